#include "qfc/design.hpp"
#include "qfc/errors.hpp"
#include "qfc/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace qfc;

namespace {

PolingProfile matched_poling(const BandTriple& b, double length) {
  const auto sol = poling_period_for(b, b.signal_nm, b.idler_nm);
  return PolingProfile::uniform(length, sol.period_um, sol.grating_k > 0 ? 1.0 : -1.0);
}

DeviceDesign make_design(BandTriple bands, Architecture arch, double radius_um, double r_s, double r_i) {
  DeviceDesign d(std::move(bands));
  d.architecture = arch;
  d.ring.radius_um = radius_um;
  d.ring.reflectivity_signal = r_s;
  d.ring.reflectivity_idler = r_i;
  d.ring.loss_db_per_m = 2.7;
  d.poling = matched_poling(d.bands, d.ring.circumference_um());
  d.pump.center_nm = d.bands.pump_nm;
  d.pump.cw_linewidth = cw_numerical_linewidth(d);
  return d;
}

DeviceDesign lnoi_single(double r_s = 0.99) {
  const auto b = presets::lnoi_bands();
  const double r = radius_for_resonance(b.signal, 1550.0, 51.0);
  return make_design(b, Architecture::SingleResonant, r, r_s, 0.0);
}

DeviceDesign lnoi_double(double radius_um) {
  return make_design(presets::lnoi_bands(), Architecture::DoubleResonant, radius_um, 0.98, 0.98);
}

// Half-maximum width of a sampled peak by linear interpolation on the grid.
double sampled_fwhm(const ArrayXd& x, const ArrayXd& y) {
  Index k0 = 0;
  const double peak = y.maxCoeff(&k0);
  const double half = 0.5 * peak;
  Index lo = k0;
  while (lo > 0 && y[lo - 1] > half) --lo;
  Index hi = k0;
  while (hi + 1 < y.size() && y[hi + 1] > half) ++hi;
  REQUIRE(lo > 0);
  REQUIRE(hi + 1 < y.size());
  const double xl = x[lo - 1] + (x[lo] - x[lo - 1]) * (half - y[lo - 1]) / (y[lo] - y[lo - 1]);
  const double xr = x[hi] + (x[hi + 1] - x[hi]) * (y[hi] - half) / (y[hi] - y[hi + 1]);
  return std::abs(xr - xl);
}

std::size_t brute_force_comb_count(const DeviceDesign& d) {
  const double len = d.ring.circumference_um();
  const double m_a = mode_number(d.bands.signal, len, d.signal_window_min_nm());
  const double m_b = mode_number(d.bands.signal, len, d.signal_window_max_nm());
  std::size_t n = 0;
  for (auto m = static_cast<long long>(std::ceil(std::min(m_a, m_b))); m <= std::floor(std::max(m_a, m_b)); ++m) ++n;
  return n;
}

}  // namespace

TEST_CASE("no confinement means no frequency compression") {
  auto d = lnoi_single(0.0);
  d.input_fwhm_nm = 2.0;
  const auto rep = single_resonant_spectrum(d);
  CHECK(rep.frequency_compression == doctest::Approx(1.0).epsilon(0.02));
  // in wavelength the idler band is narrower by (lambda_s / lambda_i)^2
  const double ratio = (1550.0 / 780.0) * (1550.0 / 780.0);
  CHECK(rep.compression_factor / rep.frequency_compression == doctest::Approx(ratio).epsilon(0.01));
}

TEST_CASE("single-resonant output inherits the signal linewidth in frequency") {
  const auto d = lnoi_single(0.99);
  const auto rep = single_resonant_spectrum(d);
  const double res = signal_resonances_in_window(d).front();
  const auto lw = linewidth_q(d.ring, d.bands.signal, res, Band::Signal);
  const double signal_hz = kSpeedOfLightNmPerS * lw.fwhm_pm * 1e-3 / (res * res);
  CHECK(rep.fwhm_hz == doctest::Approx(signal_hz).epsilon(0.05));
  CHECK(rep.dominant_peaks == 1);
  CHECK(rep.cavity_fwhm_pm.has_value());
  CHECK(rep.loaded_q == doctest::Approx(rep.peak_nm / (rep.fwhm_pm * 1e-3)));
  CHECK(std::abs(rep.peak_nm - 780.0) < 1e-3 * rep.fwhm_pm);
}

TEST_CASE("single-resonance flag agrees with a brute-force comb count") {
  const auto b = presets::lnoi_bands();
  for (double r = 30.0; r <= 80.0; r += 1.7) {
    auto d = make_design(b, Architecture::SingleResonant, r, 0.99, 0.0);
    const std::size_t count = brute_force_comb_count(d);
    CHECK(signal_resonances_in_window(d).size() == count);
    if (count == 1) {
      const auto rep = single_resonant_spectrum(d);
      CHECK(rep.validity.single_signal_resonance == true);
      CHECK(window_fsr_diagnostic(d).has_value() == (fsr(d.ring, b.signal, 1550.0) < d.window_nm));
    } else {
      CHECK_THROWS_AS(single_resonant_spectrum(d), ArchitectureViolation);
    }
  }
}

TEST_CASE("architecture violation names the resonance count") {
  auto d = make_design(presets::lnoi_bands(), Architecture::SingleResonant, 200.0, 0.99, 0.0);
  try {
    single_resonant_spectrum(d);
    FAIL("expected an architecture violation");
  } catch (const ArchitectureViolation& e) {
    CHECK(std::string(e.what()).find("signal resonances inside") != std::string::npos);
  }
}

TEST_CASE("double-resonant with a transparent idler coupler reduces to single-resonant") {
  const auto single = lnoi_single(0.99);
  auto dbl = single;
  dbl.architecture = Architecture::DoubleResonant;
  const SpectrumModel a(single, false);
  const SpectrumModel b(dbl, true);
  const double w0 = omega_from_wavelength(780.0);
  for (int k = -200; k <= 200; ++k) {
    const double w = w0 + k * 2e9;
    CHECK(std::abs(a(w) - b(w)) <= 1e-12 * std::abs(a(w)));
  }
  const auto ra = single_resonant_spectrum(single);
  const auto rb = double_resonant_spectrum(dbl);
  REQUIRE(ra.spectrum.value.size() == rb.spectrum.value.size());
  CHECK((ra.spectrum.value - rb.spectrum.value).abs().maxCoeff() <= 1e-12);
  CHECK(rb.fwhm_pm == doctest::Approx(ra.fwhm_pm).epsilon(1e-12));
}

TEST_CASE("commensurate combs reproduce the Lorentzian product") {
  // Constant indices tuned so that 1550 nm and 780 nm are both exact members.
  const double radius = 120.0;
  const double len_nm = kTwoPi * radius * 1e3;
  const double ns = std::round(2.0 * len_nm / 1550.0) * 1550.0 / len_nm;
  const double ni = std::round(2.1 * len_nm / 780.0) * 780.0 / len_nm;
  auto b = BandTriple::from_signal_idler(1550.0, 780.0, DispersionProvider::constant(2.0, 300.0, 3000.0),
                                         DispersionProvider::constant(ns, 300.0, 3000.0),
                                         DispersionProvider::constant(ni, 300.0, 3000.0));
  auto d = make_design(b, Architecture::DoubleResonant, radius, 0.98, 0.97);
  d.input_fwhm_nm = 3.0;
  const auto rep = double_resonant_spectrum(d);
  REQUIRE(rep.validity.coincidence_found == true);
  CHECK(rep.predicted_peak_nm.value() == doctest::Approx(780.0).epsilon(1e-12));
  // the smooth PMF and input factors pull the peak by a few fm only
  CHECK(std::abs(rep.peak_nm - 780.0) < 1e-5);

  const double a = round_trip_amplitude(d.ring);
  const double wp = omega_from_wavelength(b.pump_nm);
  const double ws0 = omega_from_wavelength(1550.0);
  const double in_width = omega_width_from_nm(3.0, 1550.0);
  const double len_um = d.ring.circumference_um();
  auto oracle = [&](double wi) {
    const double ws = wi - wp;
    const double phs = ns * ws * len_um * 1e-6 / kSpeedOfLight;
    const double phi = ni * wi * len_um * 1e-6 / kSpeedOfLight;
    const double bs = std::norm(allpass_buildup(0.98, a, phs));
    const double bi = std::norm(allpass_buildup(0.97, a, phi));
    const double delta = (2.0 * wp + ns * ws - ni * wi) * 1e-6 / kSpeedOfLight + d.poling.grating_k();
    const double pmf = std::norm(kQpmFirstOrder * pmf_uniform(delta, d.poling.length_um));
    const double x = (ws - ws0) / in_width;
    return bs * bi * pmf * std::exp(-4.0 * std::numbers::ln2 * x * x);
  };
  const auto& sp = rep.spectrum;
  ArrayXd expected(sp.idler_omega.size());
  for (Index k = 0; k < expected.size(); ++k) expected[k] = oracle(sp.idler_omega[k]);
  expected /= expected.maxCoeff();
  CHECK((expected - sp.value).abs().maxCoeff() < 1e-6);
}

TEST_CASE("harmonic indices: every signal mode is doubly resonant") {
  // n_i / lambda_i = 2 n_s / lambda_s, so the idler comb contains every
  // other idler mode at each signal resonance.
  const double ns = 2.0;
  const double ni = 2.0 * ns * 780.0 / 1550.0;
  auto b = BandTriple::from_signal_idler(1550.0, 780.0, DispersionProvider::constant(2.0, 300.0, 3000.0),
                                         DispersionProvider::constant(ns, 300.0, 3000.0),
                                         DispersionProvider::constant(ni, 300.0, 3000.0));
  RingSpec ring;
  ring.reflectivity_signal = 0.98;
  ring.reflectivity_idler = 0.98;
  ring.loss_db_per_m = 2.7;
  const auto found = search_double_resonance(b, ring, 50.0, 52.0);
  const double per_mode = 1550.0 / (kTwoPi * ns * 1e3);
  std::vector<double> radii;
  for (const auto& c : found) {
    CHECK(c.residual < 1e-4);
    CHECK(c.idler_mode == 2 * c.signal_mode);
    CHECK(c.radius_um == doctest::Approx(c.signal_mode * per_mode).epsilon(1e-9));
    radii.push_back(c.radius_um);
  }
  const auto expected = static_cast<std::size_t>(std::floor(52.0 / per_mode) - std::ceil(50.0 / per_mode) + 1);
  CHECK(found.size() == expected);
  std::sort(radii.begin(), radii.end());
  for (std::size_t k = 1; k < radii.size(); ++k) CHECK(radii[k] - radii[k - 1] == doctest::Approx(per_mode).epsilon(1e-6));
}

TEST_CASE("radius search agrees with a fine brute-force scan") {
  const auto b = presets::lnoi_bands();
  RingSpec ring;
  ring.reflectivity_signal = 0.98;
  ring.reflectivity_idler = 0.98;
  ring.loss_db_per_m = 2.7;
  const double lo = 700.0;
  const double hi = 800.0;
  const auto found = search_double_resonance(b, ring, lo, hi);
  REQUIRE(!found.empty());

  const double ms = kTwoPi * refractive_index(b.signal, 1550.0) * 1e3 / 1550.0;
  const double mi = kTwoPi * refractive_index(b.idler, 780.0) * 1e3 / 780.0;
  auto lines = [&](double r) {
    RingSpec t = ring;
    t.radius_um = r;
    const double f = finesse(0.98, round_trip_amplitude(t));
    return std::pair{(ms * r - std::round(ms * r)) * f, (mi * r - std::round(mi * r)) * f};
  };
  std::set<std::pair<long long, long long>> reported;
  for (const auto& c : found) {
    reported.insert({c.signal_mode, c.idler_mode});
    const auto [s, i] = lines(c.radius_um);
    CHECK(std::max(std::abs(s), std::abs(i)) == doctest::Approx(c.residual).epsilon(1e-6));
    CHECK(c.residual <= 0.5);
  }
  // Fine scan at a step far below the width of a coincidence window.
  const double step = 2e-5;
  std::size_t hits = 0;
  for (double r = lo; r < hi; r += step) {
    const auto [s, i] = lines(r);
    if (std::max(std::abs(s), std::abs(i)) < 0.45) {
      ++hits;
      CHECK(reported.count({std::llround(ms * r), std::llround(mi * r)}) == 1);
    }
  }
  CHECK(hits > 0);
}

TEST_CASE("radius search failure modes") {
  const auto b = presets::lnoi_bands();
  RingSpec ring;
  ring.reflectivity_signal = 0.98;
  ring.reflectivity_idler = 0.98;
  ring.loss_db_per_m = 2.7;
  CHECK_THROWS_AS(search_double_resonance(b, ring, 800.0, 700.0), NotFoundError);
  try {
    search_double_resonance(b, ring, 700.0, 700.001, 1e-3);
    FAIL("expected no candidate");
  } catch (const NotFoundError& e) {
    CHECK(std::string(e.what()).find("nearest miss") != std::string::npos);
  }
  ring.reflectivity_idler = 0.0;
  CHECK_THROWS_AS(search_double_resonance(b, ring, 700.0, 800.0), InvalidArgument);
}

TEST_CASE("a searched radius yields one dominant peak at the predicted idler resonance") {
  RingSpec ring;
  ring.reflectivity_signal = 0.98;
  ring.reflectivity_idler = 0.98;
  ring.loss_db_per_m = 2.7;
  const auto found = search_double_resonance(presets::lnoi_bands(), ring, 760.0, 780.0);
  REQUIRE(!found.empty());
  const auto d = lnoi_double(found.front().radius_um);
  const auto rep = double_resonant_spectrum(d);
  CHECK(rep.dominant_peaks == 1);
  REQUIRE(rep.predicted_peak_nm.has_value());
  const double res = *rep.predicted_peak_nm;
  const auto lw = linewidth_q(d.ring, d.bands.idler, res, Band::Idler);
  CHECK(std::abs(rep.peak_nm - res) * 1e3 < lw.fwhm_pm);
  CHECK(rep.side_suppression_db.value_or(1e9) > 3.0);
}

TEST_CASE("a radius without coincidence is reported as such") {
  const auto b = presets::lnoi_bands();
  // Signal exactly resonant, idler detuned by a quarter mode at least.
  double r = radius_for_resonance(b.signal, 1550.0, 700.0);
  const double per_mode = 1550.0 / (kTwoPi * refractive_index(b.signal, 1550.0) * 1e3);
  for (int k = 0; k < 200; ++k, r += per_mode) {
    const double mi = mode_number(b.idler, kTwoPi * r, 780.0);
    if (std::abs(mi - std::round(mi)) > 0.25) break;
  }
  auto d = lnoi_double(r);
  d.window_nm = 0.2;
  CHECK_THROWS_AS(double_resonant_spectrum(d), NoConversionPeakError);
}

TEST_CASE("compression factor from the raw spectrum and retention bounds") {
  const auto d = lnoi_single(0.99);
  const auto rep = single_resonant_spectrum(d);
  const double fwhm_nm = sampled_fwhm(rep.spectrum.idler_nm, rep.spectrum.value);
  CHECK(d.input_fwhm_nm / fwhm_nm == doctest::Approx(rep.compression_factor).epsilon(0.005));
  const auto& r = rep.retention;
  for (double f : {r.in_coupling, r.conversion, r.escape, r.out_coupling}) CHECK(r.total <= f);
  CHECK(r.total == doctest::Approx(r.in_coupling * r.conversion * r.escape * r.out_coupling));
  CHECK(r.escape == doctest::Approx(escape_probability(d.ring, Band::Signal)));
}

TEST_CASE("reflectivity sweep trades linewidth against retention") {
  const auto rep = compression_report(lnoi_single(0.99), {0.9, 0.95, 0.99, 0.999});
  REQUIRE(rep.sweep.size() == 4);
  for (std::size_t k = 1; k < rep.sweep.size(); ++k) {
    CHECK(rep.sweep[k].fwhm_pm < rep.sweep[k - 1].fwhm_pm);
    CHECK(rep.sweep[k].compression_factor > rep.sweep[k - 1].compression_factor);
    CHECK(rep.sweep[k].retention < rep.sweep[k - 1].retention);
    CHECK(rep.sweep[k].escape < rep.sweep[k - 1].escape);
  }
}

TEST_CASE("loaded-Q calibration") {
  auto d = lnoi_single(0.99);
  d.ring.reflectivity_signal = reflectivity_for_loaded_q(d, 1e5);
  d.pump.cw_linewidth = cw_numerical_linewidth(d);
  auto rep = single_resonant_spectrum(d);
  CHECK(rep.loaded_q == doctest::Approx(1e5).epsilon(1e-4));
  CHECK(rep.fwhm_pm == doctest::Approx(7.8).epsilon(0.005));
  CHECK(rep.compression_factor == doctest::Approx(641.0).epsilon(0.01));

  d.ring.reflectivity_signal = reflectivity_for_loaded_q(d, 1.6e5);
  d.pump.cw_linewidth = cw_numerical_linewidth(d);
  rep = single_resonant_spectrum(d);
  CHECK(rep.compression_factor >= 1000.0);
  CHECK_THROWS_AS(reflectivity_for_loaded_q(d, -1.0), InvalidArgument);
}

TEST_CASE("window chirp design") {
  const auto b = presets::lnoi_bands();
  const auto base = matched_poling(b, 10000.0);

  const auto none = chirp_for_window(b, base, 0.0);
  CHECK(none.profile.kind == PolingKind::Uniform);
  CHECK(none.profile.chirp_rate == 0.0);

  CHECK(window_ripple(b, base, 5.0) > 0.2);
  const auto five = chirp_for_window(b, base, 5.0);
  CHECK(five.profile.kind == PolingKind::LinearChirp);
  CHECK(five.profile.chirp_rate != 0.0);
  CHECK(five.ripple <= 0.2);
  CHECK(window_ripple(b, five.profile, 5.0) == doctest::Approx(five.ripple));

  const auto ten = chirp_for_window(b, base, 10.0);
  CHECK(ten.mismatch_span == doctest::Approx(2.0 * five.mismatch_span).epsilon(0.05));
  if (ten.margin == five.margin)
    CHECK(ten.profile.chirp_rate == doctest::Approx(2.0 * five.profile.chirp_rate).epsilon(0.05));

  CHECK_THROWS_AS(chirp_for_window(b, base, 5.0, 1e-6), InfeasibleError);
  CHECK_THROWS_AS(chirp_for_window(b, base, -1.0), InvalidArgument);
}
