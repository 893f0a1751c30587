#include "qfc/conversion.hpp"
#include "qfc/errors.hpp"
#include "qfc/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qfc;

namespace {

// Providers with prescribed group indices at the design wavelengths.
DispersionProvider linear_mode(double center_nm, double n, double ng, double lo, double hi) {
  return DispersionProvider::polynomial(PolynomialModel{{n, (n - ng) / center_nm}, center_nm}, lo, hi);
}

BandTriple matched_bands() {
  // v_p = v_i: the asymmetric matching that orients the PMF at ~90 degrees.
  return BandTriple::from_signal_idler(1550.0, 780.0, linear_mode(1570.13, 1.85, 2.28, 1300.0, 1900.0),
                                       linear_mode(1550.0, 1.80, 2.20, 1300.0, 1900.0),
                                       linear_mode(780.0, 2.10, 2.28, 650.0, 950.0));
}

PumpSpec gaussian_pump(const BandTriple& b, double fwhm_nm, double phase = 0.0) {
  PumpSpec p;
  p.center_nm = b.pump_nm;
  p.shape = PumpShape::Gaussian;
  p.fwhm_nm = fwhm_nm;
  p.phase = phase;
  return p;
}

PolingProfile matched_poling(const BandTriple& b, double length) {
  const auto sol = poling_period_for(b, b.signal_nm, b.idler_nm);
  return PolingProfile::uniform(length, sol.period_um, sol.grating_k > 0 ? 1.0 : -1.0);
}

// FWHM of |v|^2 along a uniformly sampled cut, linear interpolation at the
// crossings.
double cut_fwhm(const Eigen::VectorXcd& v, double step) {
  const Eigen::VectorXd p = v.cwiseAbs2();
  Index k0 = 0;
  const double peak = p.maxCoeff(&k0);
  const double half = 0.5 * peak;
  Index lo = k0;
  while (lo > 0 && p[lo - 1] > half) --lo;
  Index hi = k0;
  while (hi + 1 < p.size() && p[hi + 1] > half) ++hi;
  REQUIRE(lo > 0);
  REQUIRE(hi + 1 < p.size());
  const double left = (lo - 1) + (half - p[lo - 1]) / (p[lo] - p[lo - 1]);
  const double right = hi + (p[hi] - half) / (p[hi] - p[hi + 1]);
  return (right - left) * step;
}

struct Setup {
  BandTriple bands;
  PolingProfile profile;
  PumpSpec pump;
  MismatchGrid mismatch;
  PhaseMatchGrid pmf;
};

Setup small_setup(Index bins, double pump_fwhm_nm, double length, bool chirp = false) {
  auto b = matched_bands();
  auto profile = matched_poling(b, length);
  if (chirp) profile = PolingProfile::linear_chirp(length, profile.base_period_um, 4e-6, profile.grating_sign);
  auto pump = gaussian_pump(b, pump_fwhm_nm);
  const auto axes = default_grid_axes(b, pump, length, bins);
  auto mismatch = mismatch_grid(b, axes.signal, axes.idler, profile.grating_k());
  auto pmf = profile.kind == PolingKind::Uniform ? pmf_uniform_grid(mismatch, length) : pmf_chirped(profile, mismatch);
  return {std::move(b), profile, pump, std::move(mismatch), std::move(pmf)};
}

}  // namespace

TEST_CASE("pump envelope normalisation") {
  const auto b = matched_bands();
  const auto p = gaussian_pump(b, 0.5, 0.3);
  const double w0 = p.center_omega();
  CHECK(std::abs(pump_envelope(p, w0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::arg(pump_envelope(p, w0)) == doctest::Approx(0.3));
  CHECK(std::abs(pump_envelope(p, w0 + 0.5 * p.fwhm_omega())) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(std::abs(pump_envelope(p, w0 - 0.5 * p.fwhm_omega())) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));

  PumpSpec cw;
  cw.center_nm = b.pump_nm;
  cw.cw_linewidth = kTwoPi * 5e6;
  CHECK(std::abs(pump_envelope(cw, cw.center_omega() + 10.0 * cw.cw_linewidth)) < 1e-10);
  CHECK(std::abs(pump_envelope(cw, cw.center_omega() - 12.0 * cw.cw_linewidth)) < 1e-10);
}

TEST_CASE("pump invariants") {
  PumpSpec p;
  p.center_nm = 1570.0;
  CHECK_NOTHROW(p.validate());
  p.fwhm_nm = 0.1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.shape = PumpShape::Gaussian;
  CHECK_NOTHROW(p.validate());
  p.power_mw = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("conversion probability") {
  CHECK(conversion_probability(0.0, 1.0) == 0.0);
  CHECK(conversion_probability(kPi / 2.0, 1.0) == 1.0);
  CHECK(conversion_probability(1.0, kPi / 4.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(conversion_probability(-1.0, 1.0), InvalidArgument);
  for (double p : {0.0, 0.1, 0.5, 0.9, 1.0})
    CHECK(conversion_probability(interaction_for_probability(p), 1.0) == doctest::Approx(p).epsilon(1e-14));
  CHECK(interaction_for_probability(1.0) == kPi / 2.0);
  CHECK_THROWS_AS(interaction_for_probability(1.5), InvalidArgument);
}

TEST_CASE("beamsplitter transform") {
  CHECK((beamsplitter_transform(0.0, 1.0, 0.7) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const auto a = beamsplitter_transform(0.4, 1.3, 0.0);
  const auto b = beamsplitter_transform(0.4, 1.3, kPi);
  CHECK(std::abs(a(0, 1) + b(0, 1)) < 1e-15);
  CHECK(std::abs(a(1, 0) + b(1, 0)) < 1e-15);
  CHECK(std::abs(a(0, 0) - b(0, 0)) == 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto m = beamsplitter_transform(u(rng), u(rng), u(rng));
    worst = std::max(worst, (m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-15);
  // generic over the scalar type
  const auto f = beamsplitter_transform(0.3f, 1.0f, 0.0f);
  CHECK(std::abs(f(0, 0)) == doctest::Approx(std::cos(0.3f)));
}

TEST_CASE("cw pump confines the PTF to energy conservation") {
  auto b = matched_bands();
  const auto profile = matched_poling(b, 2000.0);
  PumpSpec cw;
  cw.center_nm = b.pump_nm;
  const auto axes = default_grid_axes(b, cw, profile.length_um, 64);
  cw.cw_linewidth = 0.5 * axes.signal.step;
  const auto mm = mismatch_grid(b, axes.signal, axes.idler, profile.grating_k());
  const auto pmf = pmf_uniform_grid(mm, profile.length_um);
  const auto ptf = ptf_low_gain(pmf, cw);
  const double peak = ptf.values.cwiseAbs().maxCoeff();
  const double wp = cw.center_omega();
  for (Index c = 0; c < ptf.idler.count; ++c) {
    for (Index r = 0; r < ptf.signal.count; ++r) {
      const double off = std::abs(ptf.idler[c] - ptf.signal[r] - wp);
      if (off > 10.0 * cw.cw_linewidth) {
        CHECK(std::abs(ptf.values(r, c)) < 1e-10 * peak);
      } else if (off < 1e-3 * axes.signal.step) {
        // zero-bandwidth pump: the diagonal is the PMF itself
        CHECK(std::abs(ptf.values(r, c) - pmf.values(r, c)) < 1e-12 * peak);
      }
    }
  }
  CHECK(ptf.regime == GainRegime::LowGainProduct);
  CHECK(ptf.signal == pmf.signal);
}

TEST_CASE("PTF marginal widths for a 90 degree PMF") {
  auto b = matched_bands();
  const auto profile = matched_poling(b, 40000.0);
  // Pump about ten times broader than the PMF's signal-axis width.
  const auto pump = gaussian_pump(b, 8.0);
  const double kp = inverse_group_velocity(b.pump, b.pump_nm);
  const double ks = inverse_group_velocity(b.signal, b.signal_nm);
  // sinc^2(x) halves at x = 1.39156, with x = delta L / 2 and d delta / d omega_s = k_s - k_p
  const double pmf_fwhm_s = 4.0 * 1.39155737 / profile.length_um / std::abs(ks - kp);

  const Index n = 301;
  const double step = 8.0 * pump.fwhm_omega() / (n - 1);
  const double ws = omega_from_wavelength(b.signal_nm);
  const auto sa = UniformAxis::centered(ws, pmf_fwhm_s * 4.0 / (n - 1), n);
  const auto ia = UniformAxis::centered(ws + pump.center_omega(), step, n);
  const auto mm = mismatch_grid(b, sa, ia, profile.grating_k());
  const auto ptf = ptf_low_gain(pmf_uniform_grid(mm, profile.length_um), pump);

  const double along_s = cut_fwhm(ptf.values.col(n / 2), sa.step);
  const double along_i = cut_fwhm(ptf.values.row(n / 2).transpose(), ia.step);
  CHECK(along_s == doctest::Approx(pmf_fwhm_s).epsilon(0.02));
  CHECK(along_i == doctest::Approx(pump.fwhm_omega()).epsilon(0.01));
}

TEST_CASE("PTF truncation is reported") {
  const auto s = small_setup(32, 0.05, 2000.0);
  auto wide = s.pump;
  wide.fwhm_nm = 50.0;
  CHECK_THROWS_AS(ptf_low_gain(s.pmf, wide), TruncationError);
}

TEST_CASE("Schmidt number") {
  Eigen::VectorXcd f(40), g(30);
  for (Index k = 0; k < 40; ++k) f[k] = std::polar(std::exp(-0.01 * k * k), 0.1 * k);
  for (Index k = 0; k < 30; ++k) g[k] = std::exp(-0.02 * (k - 10.0) * (k - 10.0));
  CHECK(schmidt_metrics(MatrixXcd(f * g.transpose())).schmidt_number == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(schmidt_metrics(MatrixXcd::Identity(17, 17)).schmidt_number == doctest::Approx(17.0).epsilon(1e-12));
  CHECK_THROWS_AS(schmidt_metrics(MatrixXcd::Zero(4, 4)), DegenerateError);
  const auto m = schmidt_metrics(MatrixXcd::Identity(5, 5));
  CHECK(m.singular_values.square().sum() == doctest::Approx(1.0));
}

TEST_CASE("Schmidt number falls toward 1 as the pump broadens at 90 degrees") {
  auto b = matched_bands();
  const auto profile = matched_poling(b, 4000.0);
  const double kp = inverse_group_velocity(b.pump, b.pump_nm);
  const double ks = inverse_group_velocity(b.signal, b.signal_nm);
  const double pmf_fwhm_s = 4.0 * 1.39155737 / profile.length_um / std::abs(ks - kp);
  const Index n = 96;
  const double ws = omega_from_wavelength(b.signal_nm);
  const double wp = omega_from_wavelength(b.pump_nm);
  const auto sa = UniformAxis::centered(ws, 6.0 * pmf_fwhm_s / (n - 1), n);
  const auto pmf = pmf_uniform_grid(mismatch_grid(b, sa, UniformAxis::centered(ws + wp, sa.step, n),
                                                  profile.grating_k()),
                                    profile.length_um);
  double previous = std::numeric_limits<double>::infinity();
  for (double ratio : {0.3, 1.0, 3.0, 10.0}) {
    auto pump = gaussian_pump(b, 1.0);
    pump.fwhm_nm = nm_width_from_omega(ratio * pmf_fwhm_s, b.pump_nm);
    PTFGrid ptf{pmf.signal, pmf.idler, MatrixXcd(n, n), GainRegime::LowGainProduct, 0.0, 0.0};
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) ptf.values(r, c) = pump_envelope(pump, pmf.idler[c] - pmf.signal[r]) * pmf.values(r, c);
    const double k = schmidt_metrics(ptf).schmidt_number;
    CHECK(k < previous);
    CHECK(k >= 1.0 - 1e-12);
    previous = k;
  }
  CHECK(previous < 1.3);
}

TEST_CASE("high-gain propagator: zero and weak coupling") {
  const auto s = small_setup(12, 0.02, 1500.0);
  PropagationOptions opt;
  opt.slices = 32;
  const auto u0 = propagate_high_gain(s.profile, s.mismatch, s.pump, 0.0, opt);
  CHECK((u0.u - MatrixXcd::Identity(24, 24)).cwiseAbs().maxCoeff() == 0.0);

  const double eta = 1e-6;
  const auto u1 = propagate_high_gain(s.profile, s.mismatch, s.pump, eta, opt);
  const auto u2 = propagate_high_gain(s.profile, s.mismatch, s.pump, 10.0 * eta, opt);
  const double d1 = (u1.u - MatrixXcd::Identity(24, 24)).norm();
  const double d2 = (u2.u - MatrixXcd::Identity(24, 24)).norm();
  CHECK(d2 / d1 == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("weak coupling reproduces i eta PTF^T") {
  const auto s = small_setup(24, 0.02, 1500.0);
  const auto ptf = ptf_low_gain(s.pmf, s.pump);
  PropagationOptions opt;
  opt.slices = 64;
  const double eta_full = kPi / 2.0 / (kQpmFirstOrder * s.profile.length_um);
  double previous = 1.0;
  for (double eps : {1e-2, 1e-3}) {
    const double eta = eps * eta_full;
    const auto u = propagate_high_gain(s.profile, s.mismatch, s.pump, eta, opt);
    const MatrixXcd oracle = Complex(0.0, eta) * ptf.values.transpose();
    const double err = (MatrixXcd(u.idler_from_signal()) - oracle).norm() / oracle.norm();
    CHECK(err < 0.01);
    CHECK(err < 0.5 * previous);
    previous = err;
  }
}

TEST_CASE("single-mode limit collapses to the beamsplitter") {
  auto b = matched_bands();
  const auto profile = matched_poling(b, 2000.0);
  PumpSpec pump;
  pump.center_nm = b.pump_nm;
  pump.phase = 0.4;
  const double ws = omega_from_wavelength(b.signal_nm);
  MismatchGrid g{UniformAxis{ws, 1.0, 1}, UniformAxis{ws + pump.center_omega(), 1.0, 1}, MatrixXd::Zero(1, 1)};
  const double eta_tau = 1.1;
  const double eta = eta_tau / (kQpmFirstOrder * profile.length_um);
  PropagationOptions opt;
  opt.slices = 16;
  const auto u = propagate_high_gain(profile, g, pump, eta, opt);
  const auto bs = beamsplitter_transform(eta_tau, 1.0, -pump.phase - kPi / 2.0);
  CHECK((u.u - MatrixXcd(bs)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("high-gain propagator: unitarity, convergence and time ordering") {
  const auto s = small_setup(10, 0.02, 1500.0, true);
  const double eta = 1.2 / (kQpmFirstOrder * s.profile.length_um);
  PropagationOptions opt;
  opt.slices = 512;
  const auto fine = propagate_high_gain(s.profile, s.mismatch, s.pump, eta, opt);
  CHECK(fine.unitarity_error() < 1e-6);
  CHECK(fine.slices == 512);
  opt.slices = 256;
  const auto coarse = propagate_high_gain(s.profile, s.mismatch, s.pump, eta, opt);
  CHECK(coarse.unitarity_error() < 1e-6);
  CHECK((fine.u - coarse.u).cwiseAbs().maxCoeff() < 1e-4);

  opt.reverse_slice_order = true;
  const auto reversed = propagate_high_gain(s.profile, s.mismatch, s.pump, eta, opt);
  CHECK((reversed.u - coarse.u).cwiseAbs().maxCoeff() > 1e-3);

  // z-independent generator: every slice is the same matrix, order is moot.
  MismatchGrid flat = s.mismatch;
  flat.delta.setZero();
  opt.reverse_slice_order = false;
  const auto forward = propagate_high_gain(s.profile, flat, s.pump, eta, opt);
  opt.reverse_slice_order = true;
  const auto backward = propagate_high_gain(s.profile, flat, s.pump, eta, opt);
  CHECK((forward.u - backward.u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("phase modulation keeps the map unitary and changes it") {
  const auto s = small_setup(8, 0.02, 1500.0);
  auto pump = s.pump;
  pump.power_mw = 200.0;
  const double eta = 1.0 / (kQpmFirstOrder * s.profile.length_um);
  PropagationOptions opt;
  opt.slices = 64;
  const auto plain = propagate_high_gain(s.profile, s.mismatch, pump, eta, opt);
  opt.modulation = {true, 2e-6, 1e-6, 3e-6};
  const auto modulated = propagate_high_gain(s.profile, s.mismatch, pump, eta, opt);
  CHECK(modulated.unitarity_error() < 1e-6);
  CHECK((modulated.u - plain.u).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("propagator preconditions") {
  const auto s = small_setup(8, 0.02, 1500.0);
  PropagationOptions opt;
  opt.slices = 0;
  CHECK_THROWS_AS(propagate_high_gain(s.profile, s.mismatch, s.pump, 1e-4, opt), InvalidArgument);
  auto skew = s.mismatch;
  skew.idler.step *= 1.5;
  CHECK_THROWS_AS(propagate_high_gain(s.profile, skew, s.pump, 1e-4, {}), InvalidArgument);
}

TEST_CASE("default grid axes are commensurate and centred") {
  const auto b = presets::lnoi_bands();
  PumpSpec cw;
  cw.center_nm = b.pump_nm;
  const auto axes = default_grid_axes(b, cw, 4000.0, 512);
  CHECK(axes.signal.step == axes.idler.step);
  CHECK(axes.signal.count == 512);
  CHECK(axes.signal.center() == doctest::Approx(omega_from_wavelength(1550.0)).epsilon(1e-14));
  CHECK(axes.idler.center() == doctest::Approx(omega_from_wavelength(780.0)).epsilon(1e-14));
  // short device: the span is clamped to the provider ranges
  const auto short_axes = default_grid_axes(b, cw, 100.0, 64);
  CHECK(b.signal.contains(wavelength_from_omega(short_axes.signal.front())));
  CHECK(b.idler.contains(wavelength_from_omega(short_axes.idler.back())));
}
