#pragma once

#include "qfc/qpm.hpp"
#include "qfc/types.hpp"

namespace qfc {

enum class PumpShape { Cw, Gaussian };

struct PumpSpec {
  double center_nm = 0.0;
  PumpShape shape = PumpShape::Cw;
  double fwhm_nm = 0.0;  // zero for cw
  double power_mw = 0.0;
  double phase = 0.0;    // rad
  /// Numerical FWHM (rad/s) of the narrow Gaussian standing in for a cw line.
  double cw_linewidth = kTwoPi * 1e6;

  void validate() const;
  double center_omega() const { return omega_from_wavelength(center_nm); }
  /// FWHM of |alpha|^2 in rad/s.
  double fwhm_omega() const;
};

/// Peak-normalised complex Gaussian, |alpha|^2 halves at +/- FWHM/2.
Complex pump_envelope(const PumpSpec& pump, double omega);

enum class GainRegime { LowGainProduct, HighGainPropagated };

/// Process transfer function over (omega_s, omega_i); rows signal, columns idler.
struct PTFGrid {
  UniformAxis signal;
  UniformAxis idler;
  MatrixXcd values;
  GainRegime regime = GainRegime::LowGainProduct;
  double eta = 0.0;
  double tau = 0.0;
};

/// PTF = alpha_p(omega_i - omega_s) * PMF(omega_s, omega_i).
PTFGrid ptf_low_gain(const PhaseMatchGrid& pmf, const PumpSpec& pump);

/// sin^2(eta tau).
double conversion_probability(double eta, double tau);

/// eta * tau that converts with the requested probability, in [0, pi/2].
double interaction_for_probability(double probability);

/// Two-mode map (signal, idler) -> (signal, idler):
/// [[cos, -e^{i phi} sin], [e^{-i phi} sin, cos]] with argument eta * tau.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 2, 2> beamsplitter_transform(Scalar eta, Scalar tau, Scalar phi) {
  using C = std::complex<Scalar>;
  const Scalar c = std::cos(eta * tau);
  const Scalar s = std::sin(eta * tau);
  Eigen::Matrix<C, 2, 2> m;
  m << C(c), -std::polar(Scalar(1), phi) * s,
       std::polar(Scalar(1), -phi) * s, C(c);
  return m;
}

/// Unitary map over concatenated (signal bins, idler bins) mode amplitudes.
struct TransferMatrix {
  UniformAxis signal;
  UniformAxis idler;
  MatrixXcd u;
  Index slices = 0;

  Index signal_modes() const { return signal.count; }
  Index idler_modes() const { return idler.count; }
  auto signal_to_signal() const { return u.topLeftCorner(signal.count, signal.count); }
  auto idler_from_signal() const { return u.bottomLeftCorner(idler.count, signal.count); }
  auto signal_from_idler() const { return u.topRightCorner(signal.count, idler.count); }
  auto idler_to_idler() const { return u.bottomRightCorner(idler.count, idler.count); }

  /// max |U^dagger U - I|.
  double unitarity_error() const;
};

struct PhaseModulation {
  bool enabled = false;
  double spm = 0.0;         // pump self-phase, rad / (mW um)
  double xpm_signal = 0.0;  // rad / (mW um)
  double xpm_idler = 0.0;
};

struct PropagationOptions {
  Index slices = 256;
  double steps_per_period = 20.0;
  PhaseModulation modulation;
  bool reverse_slice_order = false;  // time-ordering witness only
  int threads = 1;
};

/// z-ordered product of exact slice exponentials exp(i H_j), where H_j couples
/// signal and idler bins through eta * alpha_p * (PMF restricted to slice j).
/// To first order the idler<-signal block equals i * eta * PTF^T.
TransferMatrix propagate_high_gain(const PolingProfile& profile, const MismatchGrid& grid,
                                   const PumpSpec& pump, double eta, const PropagationOptions& options = {});

struct SchmidtMetrics {
  ArrayXd singular_values;  // normalised so that sum s^2 = 1
  double schmidt_number = 0.0;
};

SchmidtMetrics schmidt_metrics(const PTFGrid& ptf);
SchmidtMetrics schmidt_metrics(const MatrixXcd& values);

/// Commensurate axes centred on (omega_s, omega_s + omega_p) spanning
/// span_factor times the pump-plus-PMF support.
struct GridAxes {
  UniformAxis signal;
  UniformAxis idler;
};
GridAxes default_grid_axes(const BandTriple& bands, const PumpSpec& pump, double length_um, Index points,
                           double span_factor = 3.0);

}  // namespace qfc
