#include "qfc/conversion.hpp"

#include "qfc/errors.hpp"
#include "qfc/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfc {

void PumpSpec::validate() const {
  if (!(center_nm > 0.0)) throw InvalidArgument("pump wavelength must be positive");
  if (fwhm_nm < 0.0) throw InvalidArgument("pump bandwidth must be non-negative");
  if (power_mw < 0.0) throw InvalidArgument("pump power must be non-negative");
  if ((shape == PumpShape::Cw) != (fwhm_nm == 0.0))
    throw InvalidArgument("pump shape cw requires zero bandwidth and gaussian a positive one");
  if (!(cw_linewidth > 0.0)) throw InvalidArgument("cw numerical linewidth must be positive");
}

double PumpSpec::fwhm_omega() const {
  return shape == PumpShape::Cw ? cw_linewidth : omega_width_from_nm(fwhm_nm, center_nm);
}

Complex pump_envelope(const PumpSpec& pump, double omega) {
  const double x = (omega - pump.center_omega()) / pump.fwhm_omega();
  return std::exp(-2.0 * std::numbers::ln2 * x * x) * std::polar(1.0, pump.phase);
}

PTFGrid ptf_low_gain(const PhaseMatchGrid& pmf, const PumpSpec& pump) {
  pump.validate();
  const double lo = pmf.idler.front() - pmf.signal.back();
  const double hi = pmf.idler.back() - pmf.signal.front();
  const double support = 3.0 * pump.fwhm_omega();
  const double w0 = pump.center_omega();
  if (w0 - support < lo || w0 + support > hi) {
    std::ostringstream os;
    os.precision(6);
    os << "pump support [" << w0 - support << ", " << w0 + support
       << "] rad/s exceeds the grid's omega_i - omega_s span [" << lo << ", " << hi
       << "] rad/s; widen the grid to at least " << 2.0 * support << " rad/s around the pump";
    throw TruncationError(os.str());
  }
  PTFGrid out{pmf.signal, pmf.idler, MatrixXcd(pmf.values.rows(), pmf.values.cols()),
              GainRegime::LowGainProduct, 0.0, 0.0};
  for (Index c = 0; c < pmf.idler.count; ++c)
    for (Index r = 0; r < pmf.signal.count; ++r)
      out.values(r, c) = pump_envelope(pump, pmf.idler[c] - pmf.signal[r]) * pmf.values(r, c);
  return out;
}

double conversion_probability(double eta, double tau) {
  if (eta < 0.0 || tau < 0.0) throw InvalidArgument("conversion_probability: eta and tau must be non-negative");
  const double s = std::sin(eta * tau);
  return s * s;
}

double interaction_for_probability(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0))
    throw InvalidArgument("target conversion probability must lie in [0, 1]");
  return std::asin(std::sqrt(probability));
}

double TransferMatrix::unitarity_error() const {
  const MatrixXcd d = u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

TransferMatrix propagate_high_gain(const PolingProfile& profile, const MismatchGrid& grid,
                                   const PumpSpec& pump, double eta, const PropagationOptions& options) {
  profile.validate();
  pump.validate();
  if (options.slices < 1) throw InvalidArgument("propagate_high_gain: slices must be >= 1");
  if (grid.signal.count > 1 && grid.idler.count > 1 &&
      std::abs(grid.signal.step - grid.idler.step) > 1e-9 * std::abs(grid.signal.step))
    throw InvalidArgument("propagate_high_gain: signal and idler grids are not commensurate");

  const Index ns = grid.signal.count;
  const Index ni = grid.idler.count;
  const Index n = ns + ni;
  const double dz = profile.length_um / static_cast<double>(options.slices);

  MatrixXcd pump_weight(ni, ns);
  for (Index c = 0; c < ni; ++c)
    for (Index r = 0; r < ns; ++r) pump_weight(c, r) = eta * pump_envelope(pump, grid.idler[c] - grid.signal[r]);

  const auto& mod = options.modulation;
  const double power = pump.power_mw;

  TransferMatrix out{grid.signal, grid.idler, MatrixXcd::Identity(n, n), options.slices};
  MatrixXcd generator = MatrixXcd::Zero(n, n);
  MatrixXcd coupling(ni, ns);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig;

  for (Index j = 0; j < options.slices; ++j) {
    const Index slice = options.reverse_slice_order ? options.slices - 1 - j : j;
    const double z0 = dz * static_cast<double>(slice);
    const double z1 = z0 + dz;
    const Index steps = pmf_steps(profile, z0, z1, options.steps_per_period);
    const Complex spm_phase =
        mod.enabled ? std::polar(1.0, mod.spm * power * 0.5 * (z0 + z1)) : Complex(1.0);

    parallel_for(ni * ns, options.threads, [&](std::ptrdiff_t k) {
      const Index c = k / ns;
      const Index r = k % ns;
      coupling(c, r) = spm_phase * pump_weight(c, r) * pmf_segment(profile, grid.delta(r, c), z0, z1, steps);
    });

    generator.setZero();
    generator.bottomLeftCorner(ni, ns) = coupling;
    generator.topRightCorner(ns, ni) = coupling.adjoint();
    if (mod.enabled) {
      generator.topLeftCorner(ns, ns).diagonal().setConstant(mod.xpm_signal * power * dz);
      generator.bottomRightCorner(ni, ni).diagonal().setConstant(mod.xpm_idler * power * dz);
    }

    eig.compute(generator);
    if (eig.info() != Eigen::Success)
      throw NumericalStabilityError("propagate_high_gain: slice eigendecomposition failed");
    const Eigen::ArrayXcd phases = (Complex(0.0, 1.0) * eig.eigenvalues().array().cast<Complex>()).exp();
    const MatrixXcd step = eig.eigenvectors() * phases.matrix().asDiagonal() * eig.eigenvectors().adjoint();
    out.u = step * out.u;
  }

  const double err = out.unitarity_error();
  if (!(err < 1e-6)) {
    std::ostringstream os;
    os << "propagate_high_gain: transfer matrix not unitary (max |U^dag U - I| = " << err << ") at "
       << options.slices << " slices";
    throw NumericalStabilityError(os.str());
  }
  return out;
}

SchmidtMetrics schmidt_metrics(const MatrixXcd& values) {
  if (values.size() == 0 || values.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateError("schmidt_metrics: transfer function grid is identically zero");
  Eigen::BDCSVD<MatrixXcd> svd(values);
  ArrayXd s = svd.singularValues().array();
  s /= std::sqrt(s.square().sum());
  const double p2 = s.square().sum();
  const double p4 = s.square().square().sum();
  return {s, p2 * p2 / p4};
}

SchmidtMetrics schmidt_metrics(const PTFGrid& ptf) { return schmidt_metrics(ptf.values); }

GridAxes default_grid_axes(const BandTriple& bands, const PumpSpec& pump, double length_um, Index points,
                           double span_factor) {
  if (points < 1) throw InvalidArgument("grid needs at least one point");
  const double ws = omega_from_wavelength(bands.signal_nm);
  const double wp = omega_from_wavelength(bands.pump_nm);
  const double kp = inverse_group_velocity(bands.pump, bands.pump_nm);
  const double ks = inverse_group_velocity(bands.signal, bands.signal_nm);
  const double ki = inverse_group_velocity(bands.idler, bands.idler_nm);
  // Distance between the first sinc nulls, mapped onto each frequency axis.
  const double null_width = 4.0 * kPi / length_um;
  const double slope = std::max(std::abs(ks - kp), std::abs(kp - ki));
  const double pmf_width = null_width / slope;
  const double pump_width = pump.shape == PumpShape::Cw ? 0.0 : pump.fwhm_omega();
  double span = span_factor * (pump_width + pmf_width);
  // Short devices have a broad PMF; keep every grid wavelength inside the
  // providers' ranges.
  auto half_room = [](const DispersionProvider& p, double w) {
    return std::min(omega_from_wavelength(p.min_nm()) - w, w - omega_from_wavelength(p.max_nm()));
  };
  const double room = std::min({half_room(bands.signal, ws), half_room(bands.idler, ws + wp),
                                0.5 * half_room(bands.pump, wp)});
  span = std::min(span, 2.0 * 0.99 * room);
  const double step = points > 1 ? span / static_cast<double>(points - 1) : 1.0;
  return {UniformAxis::centered(ws, step, points), UniformAxis::centered(ws + wp, step, points)};
}

}  // namespace qfc
