#include "qfc/qpm.hpp"

#include "qfc/errors.hpp"
#include "qfc/parallel.hpp"

#include <cmath>
#include <sstream>

namespace qfc {

namespace {

// Largest quadratic phase a single quadrature step may carry.
constexpr double kMaxStepCurvaturePhase = 1e-2;
// Re-seed the rotation recurrence this often to bound drift.
constexpr Index kReseedInterval = 512;

double taylor_sinc(double x) {
  if (std::abs(x) > 1e-2) return std::sin(x) / x;
  const double x2 = x * x;
  return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
}

}  // namespace

PolingProfile PolingProfile::uniform(double length_um, double period_um, double grating_sign) {
  PolingProfile p;
  p.length_um = length_um;
  p.kind = PolingKind::Uniform;
  p.base_period_um = period_um;
  p.grating_sign = grating_sign;
  p.validate();
  return p;
}

PolingProfile PolingProfile::linear_chirp(double length_um, double period_um, double chirp_rate,
                                          double grating_sign) {
  PolingProfile p;
  p.length_um = length_um;
  p.kind = chirp_rate == 0.0 ? PolingKind::Uniform : PolingKind::LinearChirp;
  p.base_period_um = period_um;
  p.chirp_rate = chirp_rate;
  p.grating_sign = grating_sign;
  p.validate();
  return p;
}

double PolingProfile::k_slope() const {
  if (kind == PolingKind::Uniform) return 0.0;
  return -kTwoPi * chirp_rate / (base_period_um * base_period_um);
}

double PolingProfile::local_period(double z_um) const {
  const double k = kTwoPi / base_period_um + k_slope() * (z_um - 0.5 * length_um);
  return kTwoPi / k;
}

double PolingProfile::total_periods() const {
  // K is linear about the centre, so its mean over [0, L] is K0.
  return length_um / base_period_um;
}

void PolingProfile::validate() const {
  if (!(length_um > 0.0)) throw InvalidArgument("poling length must be positive");
  if (!(base_period_um > 0.0)) throw InvalidArgument("poling period must be positive");
  if (grating_sign != 1.0 && grating_sign != -1.0) throw InvalidArgument("grating sign must be +1 or -1");
  if (kind == PolingKind::Uniform && chirp_rate != 0.0)
    throw InvalidArgument("uniform poling cannot carry a chirp rate");
  const double k0 = kTwoPi / base_period_um;
  const double half_swing = 0.5 * std::abs(k_slope()) * length_um;
  if (!(k0 - half_swing > 0.0))
    throw InvalidArgument("chirped poling period becomes non-positive inside the poled length");
}

double phase_mismatch(const BandTriple& bands, double signal_nm, double idler_nm, double grating_k) {
  const double pump_nm = pump_wavelength_for(signal_nm, idler_nm);
  return propagation_constant(bands.pump, pump_nm) + propagation_constant(bands.signal, signal_nm) -
         propagation_constant(bands.idler, idler_nm) + grating_k;
}

PolingSolution poling_period_for(const BandTriple& bands, double signal_nm, double idler_nm) {
  const double material = phase_mismatch(bands, signal_nm, idler_nm, 0.0);
  if (std::abs(material) < 1e-12) throw DegenerateError("material phase mismatch is zero: no poling needed");
  return {kTwoPi / std::abs(material), -material, material};
}

MismatchGrid mismatch_grid(const BandTriple& bands, const UniformAxis& signal_omega,
                           const UniformAxis& idler_omega, double grating_k) {
  MismatchGrid g{signal_omega, idler_omega, MatrixXd(signal_omega.count, idler_omega.count)};
  ArrayXd beta_s(signal_omega.count);
  ArrayXd beta_i(idler_omega.count);
  for (Index r = 0; r < signal_omega.count; ++r)
    beta_s[r] = propagation_constant(bands.signal, wavelength_from_omega(signal_omega[r]));
  for (Index c = 0; c < idler_omega.count; ++c)
    beta_i[c] = propagation_constant(bands.idler, wavelength_from_omega(idler_omega[c]));
  for (Index c = 0; c < idler_omega.count; ++c) {
    for (Index r = 0; r < signal_omega.count; ++r) {
      const double omega_p = idler_omega[c] - signal_omega[r];
      if (!(omega_p > 0.0)) throw RangeError("mismatch grid: idler frequency below signal frequency");
      g.delta(r, c) = propagation_constant(bands.pump, wavelength_from_omega(omega_p)) + beta_s[r] -
                      beta_i[c] + grating_k;
    }
  }
  return g;
}

PhaseMatchGrid pmf_uniform_grid(const MismatchGrid& grid, double length_um) {
  PhaseMatchGrid out{grid.signal, grid.idler, MatrixXcd(grid.delta.rows(), grid.delta.cols()), length_um};
  out.values = grid.delta.unaryExpr(
      [&](double d) -> Complex { return kQpmFirstOrder * pmf_uniform(d, length_um); });
  return out;
}

Index pmf_steps(const PolingProfile& profile, double z_begin, double z_end, double steps_per_period) {
  if (steps_per_period < 20.0) {
    std::ostringstream os;
    os << "pmf quadrature needs at least 20 steps per poling period (got " << steps_per_period << ")";
    throw ResolutionError(os.str());
  }
  const double span = z_end - z_begin;
  const double periods = span / profile.base_period_um;
  auto steps = static_cast<Index>(std::ceil(steps_per_period * periods));
  steps = std::max<Index>(steps, 1);
  const double kappa = std::abs(profile.k_slope());
  if (kappa > 0.0) {
    const double h = span / static_cast<double>(steps);
    if (kappa * h * h > kMaxStepCurvaturePhase) {
      const auto minimum = static_cast<Index>(std::ceil(span * std::sqrt(kappa / kMaxStepCurvaturePhase)));
      std::ostringstream os;
      os << "pmf quadrature too coarse for the chirp: " << steps << " steps, needs at least " << minimum;
      throw ResolutionError(os.str());
    }
  }
  return steps;
}

Complex pmf_segment(const PolingProfile& profile, double delta, double z_begin, double z_end, Index steps) {
  if (steps < 1) throw ResolutionError("pmf quadrature needs at least one step");
  const double length = profile.length_um;
  const double kappa = profile.grating_sign * profile.k_slope();
  const double h = (z_end - z_begin) / static_cast<double>(steps);
  if (std::abs(kappa) * h * h > kMaxStepCurvaturePhase) {
    std::ostringstream os;
    os << "pmf quadrature too coarse for the chirp: " << steps << " steps over " << z_end - z_begin << " um";
    throw ResolutionError(os.str());
  }

  // phase(z) = delta z + kappa (z^2 - L z) / 2, slope(z) = delta + kappa (z - L/2)
  auto phase = [&](double z) { return delta * z + 0.5 * kappa * (z * z - length * z); };
  auto slope = [&](double z) { return delta + kappa * (z - 0.5 * length); };

  const Complex curvature = std::polar(1.0, kappa * h * h);
  Complex acc = 0.0;
  Complex rotor;
  Complex step_rotor;
  for (Index j = 0; j < steps; ++j) {
    const double mid = z_begin + (static_cast<double>(j) + 0.5) * h;
    if (j % kReseedInterval == 0) {
      rotor = std::polar(1.0, phase(mid));
      step_rotor = std::polar(1.0, phase(mid + h) - phase(mid));
    }
    acc += rotor * taylor_sinc(0.5 * h * slope(mid));
    rotor *= step_rotor;
    step_rotor *= curvature;
  }
  return kQpmFirstOrder * h * acc;
}

Complex pmf_chirped(const PolingProfile& profile, double delta, const QuadratureOptions& options) {
  const Index steps = pmf_steps(profile, 0.0, profile.length_um, options.steps_per_period);
  return pmf_segment(profile, delta, 0.0, profile.length_um, steps);
}

PhaseMatchGrid pmf_chirped(const PolingProfile& profile, const MismatchGrid& grid,
                           const QuadratureOptions& options) {
  profile.validate();
  if (!grid.delta.allFinite()) throw InvalidArgument("pmf_chirped: non-finite phase mismatch on grid");
  const Index steps = pmf_steps(profile, 0.0, profile.length_um, options.steps_per_period);
  PhaseMatchGrid out{grid.signal, grid.idler, MatrixXcd(grid.delta.rows(), grid.delta.cols()),
                     profile.length_um};
  const Index rows = grid.delta.rows();
  parallel_for(grid.delta.size(), options.threads, [&](std::ptrdiff_t k) {
    const Index r = k % rows;
    const Index c = k / rows;
    out.values(r, c) = pmf_segment(profile, grid.delta(r, c), 0.0, profile.length_um, steps);
  });
  return out;
}

double pmf_angle_from_group_indices(double ng_pump, double ng_signal, double ng_idler) {
  const double rise = ng_pump - ng_signal;
  const double run = ng_pump - ng_idler;
  const double scale = std::max({std::abs(ng_pump), std::abs(ng_signal), std::abs(ng_idler)});
  if (std::abs(rise) <= 1e-15 * scale && std::abs(run) <= 1e-15 * scale)
    throw DegenerateError("pmf_angle: all three group velocities are equal, orientation undefined");
  double theta = std::atan2(rise, run) * 180.0 / kPi;
  if (theta < 0.0) theta += 180.0;
  if (theta >= 180.0) theta -= 180.0;
  return theta;
}

double pmf_angle(const BandTriple& bands) {
  return pmf_angle_from_group_indices(group_index(bands.pump, bands.pump_nm),
                                      group_index(bands.signal, bands.signal_nm),
                                      group_index(bands.idler, bands.idler_nm));
}

}  // namespace qfc
