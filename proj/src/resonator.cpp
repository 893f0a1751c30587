#include "qfc/resonator.hpp"

#include "qfc/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <sstream>

namespace qfc {

namespace {

// Solves f(x) = 0 on a sign-changing bracket to near machine precision.
template <typename F>
double solve_bracketed(F f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw NumericalStabilityError("root bracket does not change sign");
  std::uintmax_t iterations = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52),
                                                  iterations);
  return 0.5 * (a + b);
}

double buildup_power(const RingSpec& ring, const DispersionProvider& provider, double lambda_nm, Band band) {
  return std::norm(transfer_function(ring, provider, lambda_nm, band).buildup);
}

}  // namespace

double RingSpec::reflectivity(Band band) const {
  return band == Band::Idler ? reflectivity_idler : reflectivity_signal;
}

RingSpec RingSpec::with_reflectivity(Band band, double r) const {
  RingSpec copy = *this;
  (band == Band::Idler ? copy.reflectivity_idler : copy.reflectivity_signal) = r;
  return copy;
}

void RingSpec::validate() const {
  if (!(radius_um > 0.0)) throw InvalidArgument("ring radius must be positive");
  for (double r : {reflectivity_signal, reflectivity_idler})
    if (!(r >= 0.0 && r < 1.0))
      throw InvalidArgument("ring reflectivity must lie in (0, 1), or be 0 for a non-resonant band");
  if (!(loss_db_per_m >= 0.0)) throw InvalidArgument("propagation loss must be non-negative");
  for (double e : {in_coupling, out_coupling})
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("coupling efficiencies must lie in [0, 1]");
}

double round_trip_amplitude(const RingSpec& ring, double /*lambda_nm*/) {
  if (ring.loss_db_per_m < 0.0) throw InvalidArgument("propagation loss must be non-negative");
  const double length_m = ring.circumference_um() * 1e-6;
  return std::pow(10.0, -ring.loss_db_per_m * length_m / 20.0);
}

double fsr(const RingSpec& ring, const DispersionProvider& provider, double lambda_nm) {
  return lambda_nm * lambda_nm / (group_index(provider, lambda_nm) * ring.circumference_um() * 1e3);
}

double mode_number(const DispersionProvider& provider, double circumference_um, double lambda_nm) {
  return refractive_index(provider, lambda_nm) * circumference_um * 1e3 / lambda_nm;
}

std::vector<double> resonance_comb(const RingSpec& ring, const DispersionProvider& provider, double min_nm,
                                   double max_nm) {
  std::vector<double> out;
  if (!(max_nm > min_nm)) return out;
  if (!provider.contains(min_nm) || !provider.contains(max_nm)) {
    std::ostringstream os;
    os << "resonance_comb: band [" << min_nm << ", " << max_nm << "] nm outside provider range ["
       << provider.min_nm() << ", " << provider.max_nm() << "] nm";
    throw RangeError(os.str());
  }
  const double length = ring.circumference_um();
  auto m = [&](double l) { return mode_number(provider, length, l); };
  const double m_hi = m(min_nm);
  const double m_lo = m(max_nm);
  const auto first = static_cast<long long>(std::ceil(std::min(m_lo, m_hi)));
  const auto last = static_cast<long long>(std::floor(std::max(m_lo, m_hi)));
  for (long long k = last; k >= first; --k) {
    const double target = static_cast<double>(k);
    auto f = [&](double l) { return m(l) - target; };
    double lambda = solve_bracketed(f, min_nm, max_nm);
    // Newton polish on the mode-number residual.
    for (int it = 0; it < 4 && std::abs(f(lambda)) >= 1e-11; ++it) {
      const double h = 1e-6 * lambda;
      const double slope = (f(std::min(lambda + h, max_nm)) - f(std::max(lambda - h, min_nm))) /
                           (std::min(lambda + h, max_nm) - std::max(lambda - h, min_nm));
      lambda = std::clamp(lambda - f(lambda) / slope, min_nm, max_nm);
    }
    if (std::abs(f(lambda)) >= 1e-10) {
      std::ostringstream os;
      os << "resonance_comb: root polish failed for mode " << k << " (residual " << f(lambda) << ")";
      throw NumericalStabilityError(os.str());
    }
    out.push_back(lambda);
  }
  return out;
}

RingTransfer transfer_function(const RingSpec& ring, const DispersionProvider& provider, double lambda_nm,
                               Band band) {
  const double t = ring.reflectivity(band);
  const double a = round_trip_amplitude(ring, lambda_nm);
  const double phase = propagation_constant(provider, lambda_nm) * ring.circumference_um();
  return {allpass_buildup(t, a, phase), allpass_transmission(t, a, phase)};
}

double numerical_fwhm(const RingSpec& ring, const DispersionProvider& provider, double resonance_nm, Band band) {
  const double peak = buildup_power(ring, provider, resonance_nm, band);
  const double half = 0.5 * peak;
  const double reach = 0.5 * fsr(ring, provider, resonance_nm);
  auto f = [&](double l) { return buildup_power(ring, provider, l, band) - half; };
  const double lo = std::max(resonance_nm - reach, provider.min_nm());
  const double hi = std::min(resonance_nm + reach, provider.max_nm());
  if (f(lo) > 0.0 || f(hi) > 0.0)
    throw NumericalStabilityError("numerical_fwhm: resonance does not fall below half maximum within one FSR");
  return solve_bracketed(f, resonance_nm, hi) - solve_bracketed(f, lo, resonance_nm);
}

Linewidth linewidth_q(const RingSpec& ring, const DispersionProvider& provider, double resonance_nm, Band band) {
  const double t = ring.reflectivity(band);
  const double a = round_trip_amplitude(ring, resonance_nm);
  if (t * a >= 1.0) throw UnphysicalError("linewidth_q: round-trip survival t*a >= 1");
  if (t == 0.0) throw InvalidArgument(std::string("linewidth_q: ") + std::string(to_string(band)) +
                                      " band is not resonant (R = 0)");
  const double m = mode_number(provider, ring.circumference_um(), resonance_nm);
  if (std::abs(m - std::round(m)) > 1e-6) {
    std::ostringstream os;
    os << "linewidth_q: " << resonance_nm << " nm is not a comb member (mode number " << m << ")";
    throw InvalidArgument(os.str());
  }
  Linewidth lw{};
  lw.finesse = finesse(t, a);
  lw.fsr_nm = fsr(ring, provider, resonance_nm);
  lw.fwhm_pm = lw.fsr_nm / lw.finesse * 1e3;
  lw.loaded_q = resonance_nm / (lw.fwhm_pm * 1e-3);
  lw.numerical_fwhm_pm = numerical_fwhm(ring, provider, resonance_nm, band) * 1e3;
  return lw;
}

double escape_probability(const RingSpec& ring, Band band) {
  const double t = ring.reflectivity(band);
  const double a = round_trip_amplitude(ring);
  const double kappa2 = 1.0 - t * t;
  return kappa2 / (kappa2 + (1.0 - a * a));
}

double reflectivity_for_finesse(double target_finesse, double a) {
  if (!(target_finesse > 0.0)) throw InvalidArgument("target finesse must be positive");
  // pi y = F (1 - y^2), y = sqrt(t a)
  const double f = target_finesse;
  const double y = (-kPi + std::sqrt(kPi * kPi + 4.0 * f * f)) / (2.0 * f);
  const double t = y * y / a;
  if (!(t < 1.0)) {
    std::ostringstream os;
    os << "finesse " << f << " unreachable at round-trip amplitude " << a;
    throw InfeasibleError(os.str());
  }
  return t;
}

RingResponse ring_response(const RingSpec& ring, const DispersionProvider& provider, Band band, double min_nm,
                           double max_nm, Index points) {
  ring.validate();
  if (points < 2) throw InvalidArgument("ring_response needs at least two points");
  RingResponse out;
  out.wavelength_nm = ArrayXd::LinSpaced(points, min_nm, max_nm);
  out.buildup.resize(points);
  out.transmission.resize(points);
  for (Index k = 0; k < points; ++k) {
    const auto tf = transfer_function(ring, provider, out.wavelength_nm[k], band);
    out.buildup[k] = tf.buildup;
    out.transmission[k] = tf.transmission;
  }
  if (ring.reflectivity(band) > 0.0) {
    for (double c : resonance_comb(ring, provider, min_nm, max_nm)) {
      Resonance r{c, 0.0, 0.0, 0.0};
      const double t = ring.reflectivity(band);
      const double a = round_trip_amplitude(ring, c);
      r.finesse = finesse(t, a);
      r.fwhm_pm = fsr(ring, provider, c) / r.finesse * 1e3;
      r.loaded_q = c / (r.fwhm_pm * 1e-3);
      out.resonances.push_back(r);
    }
  }
  return out;
}

double radius_for_resonance(const DispersionProvider& provider, double lambda_nm, double radius_um) {
  const double n = refractive_index(provider, lambda_nm);
  const double m = std::round(n * kTwoPi * radius_um * 1e3 / lambda_nm);
  return m * lambda_nm / (kTwoPi * n * 1e3);
}

}  // namespace qfc
