#pragma once

#include "qfc/dispersion.hpp"
#include "qfc/errors.hpp"
#include "qfc/types.hpp"

namespace qfc {

/// First-order Fourier amplitude of a 50 % duty-cycle square-wave poling.
/// Applied to every phase-matching grid, uniform or chirped.
inline constexpr double kQpmFirstOrder = 2.0 / std::numbers::pi;

enum class PolingKind { Uniform, LinearChirp };

/// Sign pattern of the nonlinearity along the interaction length.
///
/// The chirp is linear in grating wavenumber, K(z) = K0 + kappa (z - L/2), and
/// is referenced to the centre of the length so that flipping the chirp sign
/// mirrors the profile. `base_period_um` is the period at z = L/2 and
/// `chirp_rate` is dLambda/dz there; kappa = -2 pi chirp_rate / Lambda0^2.
/// `grating_sign` carries the compensation convention: the grating adds
/// grating_sign * K(z) to the material mismatch.
struct PolingProfile {
  double length_um = 0.0;
  PolingKind kind = PolingKind::Uniform;
  double base_period_um = 0.0;
  double chirp_rate = 0.0;
  double grating_sign = 1.0;
  double duty_cycle = 0.5;

  static PolingProfile uniform(double length_um, double period_um, double grating_sign = 1.0);
  static PolingProfile linear_chirp(double length_um, double period_um, double chirp_rate,
                                    double grating_sign = 1.0);

  /// Signed central grating wavenumber in rad/um.
  double grating_k() const { return grating_sign * kTwoPi / base_period_um; }
  /// dK/dz in rad/um^2 (unsigned by grating_sign).
  double k_slope() const;
  double local_period(double z_um) const;
  double total_periods() const;

  void validate() const;
};

/// Residual phase mismatch sampled on a commensurate (signal, idler) angular
/// frequency grid. Rows index the signal axis, columns the idler axis.
struct MismatchGrid {
  UniformAxis signal;
  UniformAxis idler;
  MatrixXd delta;  // rad/um, includes the central grating wavenumber
};

/// Phase-matching function on a grid, first-order QPM normalisation.
struct PhaseMatchGrid {
  UniformAxis signal;
  UniformAxis idler;
  MatrixXcd values;
  double length_um = 0.0;
};

/// beta_p + beta_s - beta_i + grating_k, with lambda_p from energy conservation.
double phase_mismatch(const BandTriple& bands, double signal_nm, double idler_nm, double grating_k);

struct PolingSolution {
  double period_um;
  double grating_k;          // signed, cancels the material mismatch
  double material_mismatch;  // rad/um
};

/// Period whose grating cancels the material mismatch at (signal_nm, idler_nm).
PolingSolution poling_period_for(const BandTriple& bands, double signal_nm, double idler_nm);

/// Raw closed form L sinc(dbeta L / 2) exp(i dbeta L / 2), without the QPM factor.
template <typename Scalar>
std::complex<Scalar> pmf_uniform(Scalar dbeta, Scalar length) {
  if (!(length > Scalar(0))) throw InvalidArgument("pmf_uniform: length must be positive");
  const Scalar half = dbeta * length / Scalar(2);
  return length * sinc(half) * std::polar(Scalar(1), half);
}

/// Builds the mismatch grid for given axes against the profile's central grating.
MismatchGrid mismatch_grid(const BandTriple& bands, const UniformAxis& signal_omega,
                           const UniformAxis& idler_omega, double grating_k);

/// kQpmFirstOrder * pmf_uniform at every grid point.
PhaseMatchGrid pmf_uniform_grid(const MismatchGrid& grid, double length_um);

struct QuadratureOptions {
  double steps_per_period = 20.0;
  int threads = 1;
};

/// Integral of the first-order poling component against exp(i delta z) over
/// [z_begin, z_end], composite midpoint with the linear phase integrated
/// exactly inside each step.
Complex pmf_segment(const PolingProfile& profile, double delta, double z_begin, double z_end,
                    Index steps);

/// Number of quadrature steps the profile needs over [z_begin, z_end].
Index pmf_steps(const PolingProfile& profile, double z_begin, double z_end, double steps_per_period);

/// Single-point chirped PMF, first-order normalised.
Complex pmf_chirped(const PolingProfile& profile, double delta, const QuadratureOptions& options = {});

PhaseMatchGrid pmf_chirped(const PolingProfile& profile, const MismatchGrid& grid,
                           const QuadratureOptions& options = {});

/// Orientation in degrees, [0, 180), of the constant-mismatch contour in the
/// (omega_s, omega_i) plane; slope d omega_i / d omega_s =
/// (1/v_p - 1/v_s) / (1/v_p - 1/v_i).
double pmf_angle(const BandTriple& bands);
double pmf_angle_from_group_indices(double ng_pump, double ng_signal, double ng_idler);

}  // namespace qfc
