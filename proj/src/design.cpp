#include "qfc/design.hpp"

#include "qfc/errors.hpp"
#include "qfc/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qfc {

namespace {

constexpr double kHalfPowerDb = 3.0103;

double frequency_linewidth_hz(const RingSpec& ring, const DispersionProvider& provider, double lambda_nm,
                              Band band) {
  const double t = ring.reflectivity(band);
  const double a = round_trip_amplitude(ring, lambda_nm);
  const double fsr_hz = kSpeedOfLight / (group_index(provider, lambda_nm) * ring.circumference_um() * 1e-6);
  return fsr_hz / finesse(t, a);
}

template <typename F>
double bisect_root(F f, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iterations = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50),
                                                  iterations);
  return 0.5 * (a + b);
}

// Walks away from the peak on the continuous model until it drops below
// `level`, then solves for the crossing.
double half_level_crossing(const SpectrumModel& model, double peak, double level, double step, double direction) {
  auto f = [&](double w) { return model(w) - level; };
  double inner = peak;
  double outer = peak + direction * step;
  for (int k = 0; k < 200000 && f(outer) > 0.0; ++k) {
    inner = outer;
    outer += direction * step;
    step *= 1.05;
  }
  if (f(outer) > 0.0) throw ResolutionError("spectrum peak never falls to half maximum");
  return direction > 0 ? bisect_root(f, inner, outer) : bisect_root(f, outer, inner);
}

EffectiveSpectrum sample_spectrum(const SpectrumModel& model, const UniformAxis& axis, int threads) {
  EffectiveSpectrum s;
  const Index n = axis.count;
  s.idler_omega = axis.values();
  s.idler_nm.resize(n);
  s.signal_nm.resize(n);
  s.value.resize(n);
  s.signal_buildup.resize(n);
  s.idler_buildup.resize(n);
  s.pmf.resize(n);
  s.input.resize(n);
  parallel_for(n, threads, [&](std::ptrdiff_t k) {
    const double w = s.idler_omega[k];
    const auto terms = model.at(w);
    s.idler_nm[k] = wavelength_from_omega(w);
    s.signal_nm[k] = wavelength_from_omega(w - model.pump_omega());
    s.value[k] = terms.total;
    s.signal_buildup[k] = terms.signal_buildup;
    s.idler_buildup[k] = terms.idler_buildup;
    s.pmf[k] = terms.pmf;
    s.input[k] = terms.input;
  });
  return s;
}

double narrowest_resonance_hz(const DeviceDesign& d, bool idler_resonant) {
  double width = std::numeric_limits<double>::infinity();
  if (d.ring.reflectivity_signal > 0.0)
    width = std::min(width, frequency_linewidth_hz(d.ring, d.bands.signal, d.bands.signal_nm, Band::Signal));
  if (idler_resonant && d.ring.reflectivity_idler > 0.0)
    width = std::min(width, frequency_linewidth_hz(d.ring, d.bands.idler, d.bands.idler_nm, Band::Idler));
  return width;
}

UniformAxis spectrum_axis(const DeviceDesign& d, const SpectrumModel& model, bool idler_resonant) {
  const double lo = omega_from_wavelength(d.signal_window_max_nm()) + model.pump_omega();
  const double hi = omega_from_wavelength(d.signal_window_min_nm()) + model.pump_omega();
  const double span = hi - lo;
  double step = span / 4000.0;
  const double narrowest = narrowest_resonance_hz(d, idler_resonant);
  if (std::isfinite(narrowest)) step = std::min(step, kTwoPi * narrowest / d.numerics.points_per_fwhm);
  const auto count = static_cast<Index>(std::ceil(span / step)) + 1;
  if (count > d.numerics.max_points) {
    std::ostringstream os;
    os << "effective spectrum needs " << count << " points to resolve the narrowest resonance, limit is "
       << d.numerics.max_points;
    throw ResolutionError(os.str());
  }
  return {lo, span / static_cast<double>(count - 1), count};
}

struct PeakInfo {
  Index index;
  double value;
};

std::vector<PeakInfo> local_maxima(const ArrayXd& v) {
  std::vector<PeakInfo> peaks;
  const Index n = v.size();
  for (Index k = 0; k < n; ++k) {
    const bool left = k == 0 || v[k] > v[k - 1];
    const bool right = k == n - 1 || v[k] >= v[k + 1];
    if (left && right && v[k] > 0.0) peaks.push_back({k, v[k]});
  }
  std::sort(peaks.begin(), peaks.end(), [](const PeakInfo& a, const PeakInfo& b) {
    return a.value != b.value ? a.value > b.value : a.index < b.index;
  });
  return peaks;
}

double ripple_of(const ArrayXd& magnitude) {
  const double mean = magnitude.mean();
  if (!(mean > 0.0)) return std::numeric_limits<double>::infinity();
  return (magnitude / mean - 1.0).abs().maxCoeff();
}

RetentionBreakdown retention_for(const DeviceDesign& d) {
  RetentionBreakdown r;
  r.in_coupling = d.ring.in_coupling;
  r.conversion = conversion_probability(d.eta_tau, 1.0);
  r.escape = escape_probability(d.ring, d.limiting_band());
  r.out_coupling = d.ring.out_coupling;
  r.total = r.in_coupling * r.conversion * r.escape * r.out_coupling;
  return r;
}

DesignReport build_report(const DeviceDesign& d, bool idler_resonant) {
  const SpectrumModel model(d, idler_resonant);
  const UniformAxis axis = spectrum_axis(d, model, idler_resonant);

  DesignReport rep;
  rep.architecture = d.architecture;
  rep.spectrum = sample_spectrum(model, axis, d.numerics.threads);

  const auto peaks = local_maxima(rep.spectrum.value);
  if (peaks.empty()) throw NoConversionPeakError("effective spectrum has no peak inside the window");
  const double grid_peak = peaks.front().value;

  // Refine the dominant peak on the continuous model.
  const Index k = peaks.front().index;
  const double lo = axis[std::max<Index>(k - 1, 0)];
  const double hi = axis[std::min<Index>(k + 1, axis.count - 1)];
  auto negated = [&](double w) { return -model(w); };
  const auto best = boost::math::tools::brent_find_minima(negated, lo, hi, 40);
  double peak_omega = axis[k];
  double peak_value = grid_peak;
  if (-best.second > peak_value) {
    peak_omega = best.first;
    peak_value = -best.second;
  }
  const double half = 0.5 * peak_value;
  const double w_lo = half_level_crossing(model, peak_omega, half, axis.step, -1.0);
  const double w_hi = half_level_crossing(model, peak_omega, half, axis.step, +1.0);

  rep.peak_omega = peak_omega;
  rep.peak_nm = wavelength_from_omega(peak_omega);
  const double fwhm_nm = wavelength_from_omega(w_lo) - wavelength_from_omega(w_hi);
  rep.fwhm_pm = fwhm_nm * 1e3;
  rep.fwhm_hz = (w_hi - w_lo) / kTwoPi;
  rep.loaded_q = rep.peak_nm / fwhm_nm;

  rep.spectrum.value /= grid_peak;
  rep.peak_count = static_cast<Index>(peaks.size());
  rep.dominant_peaks = std::count_if(peaks.begin(), peaks.end(), [&](const PeakInfo& p) {
    return 10.0 * std::log10(grid_peak / p.value) < kHalfPowerDb;
  });
  if (peaks.size() > 1) rep.side_suppression_db = 10.0 * std::log10(grid_peak / peaks[1].value);

  rep.input_fwhm_nm = d.input_fwhm_nm;
  rep.compression_factor = d.input_fwhm_nm / fwhm_nm;
  rep.frequency_compression = omega_width_from_nm(d.input_fwhm_nm, d.bands.signal_nm) / (w_hi - w_lo);
  rep.retention = retention_for(d);

  // PMF flatness over the signal window.
  ArrayXd magnitude = rep.spectrum.pmf.sqrt();
  rep.pmf_ripple = ripple_of(magnitude);

  const Band limiting = d.limiting_band();
  if (d.ring.reflectivity(limiting) > 0.0) {
    const auto& provider = d.bands.provider(limiting);
    const double center = d.bands.wavelength(limiting);
    const double reach = fsr(d.ring, provider, center);
    const auto comb = resonance_comb(d.ring, provider, std::max(center - reach, provider.min_nm() + 1.0),
                                     std::min(center + reach, provider.max_nm() - 1.0));
    if (!comb.empty()) {
      const double nearest = *std::min_element(comb.begin(), comb.end(), [&](double a, double b) {
        return std::abs(a - center) < std::abs(b - center);
      });
      const auto lw = linewidth_q(d.ring, provider, nearest, limiting);
      rep.cavity_fwhm_pm = lw.fwhm_pm;
      rep.cavity_q = lw.loaded_q;
    }
  }

  rep.signal_comb_nm = signal_resonances_in_window(d);
  return rep;
}

}  // namespace

std::string_view to_string(Architecture a) {
  return a == Architecture::SingleResonant ? "single-resonant" : "double-resonant";
}

void DeviceDesign::validate() const {
  ring.validate();
  poling.validate();
  pump.validate();
  if (!(window_nm > 0.0)) throw InvalidArgument("conversion window must be positive");
  if (!(input_fwhm_nm > 0.0)) throw InvalidArgument("input photon bandwidth must be positive");
  if (!(eta_tau >= 0.0)) throw InvalidArgument("eta*tau must be non-negative");
  if (pump.shape != PumpShape::Cw) throw InvalidArgument("resonator designs assume a cw pump");
  if (std::abs(pump.center_nm - bands.pump_nm) > 1e-6 * bands.pump_nm) {
    std::ostringstream os;
    os.precision(10);
    os << "pump wavelength " << pump.center_nm << " nm does not satisfy energy conservation (expected "
       << bands.pump_nm << " nm)";
    throw InvalidArgument(os.str());
  }
  for (double l : {signal_window_min_nm(), signal_window_max_nm()})
    if (!bands.signal.contains(l)) throw RangeError("signal window extends outside the signal provider range");
  for (double l : {idler_window_min_nm(), idler_window_max_nm()})
    if (!bands.idler.contains(l)) throw RangeError("idler window extends outside the idler provider range");
}

double DeviceDesign::idler_window_min_nm() const {
  return 1.0 / (1.0 / signal_window_min_nm() + 1.0 / bands.pump_nm);
}

double DeviceDesign::idler_window_max_nm() const {
  return 1.0 / (1.0 / signal_window_max_nm() + 1.0 / bands.pump_nm);
}

SpectrumModel::SpectrumModel(const DeviceDesign& design, bool idler_resonant)
    : design_(design),
      idler_resonant_(idler_resonant),
      pump_omega_(omega_from_wavelength(design.bands.pump_nm)),
      input_center_(omega_from_wavelength(design.bands.signal_nm)),
      input_width_(omega_width_from_nm(design.input_fwhm_nm, design.bands.signal_nm)) {
  if (design.poling.kind == PolingKind::LinearChirp)
    pmf_steps_ = pmf_steps(design.poling, 0.0, design.poling.length_um, design.numerics.steps_per_period);
}

SpectrumModel::Terms SpectrumModel::at(double idler_omega) const {
  const auto& d = design_;
  const double signal_omega = idler_omega - pump_omega_;
  const double ls = wavelength_from_omega(signal_omega);
  const double li = wavelength_from_omega(idler_omega);

  Terms t{};
  t.signal_buildup = std::norm(transfer_function(d.ring, d.bands.signal, ls, Band::Signal).buildup);
  t.idler_buildup =
      idler_resonant_ ? std::norm(transfer_function(d.ring, d.bands.idler, li, Band::Idler).buildup) : 1.0;

  const double delta = phase_mismatch(d.bands, ls, li, d.poling.grating_k());
  const Complex pmf = d.poling.kind == PolingKind::Uniform
                          ? kQpmFirstOrder * pmf_uniform(delta, d.poling.length_um)
                          : pmf_segment(d.poling, delta, 0.0, d.poling.length_um, pmf_steps_);
  t.pmf = std::norm(pump_envelope(d.pump, idler_omega - signal_omega) * pmf);

  const double x = (signal_omega - input_center_) / input_width_;
  t.input = std::exp(-4.0 * std::numbers::ln2 * x * x);
  t.total = t.signal_buildup * t.idler_buildup * t.pmf * t.input * d.ring.out_coupling;
  return t;
}

std::vector<double> signal_resonances_in_window(const DeviceDesign& design) {
  return resonance_comb(design.ring, design.bands.signal, design.signal_window_min_nm(),
                        design.signal_window_max_nm());
}

std::optional<std::string> window_fsr_diagnostic(const DeviceDesign& design) {
  const double f = fsr(design.ring, design.bands.signal, design.bands.signal_nm);
  if (f >= design.window_nm) return std::nullopt;
  std::ostringstream os;
  os.precision(4);
  os << "signal FSR " << f << " nm at r = " << design.ring.radius_um << " um is narrower than the "
     << design.window_nm << " nm conversion window; a single signal resonance in the window requires the "
     << "nearest resonance within +/-" << std::max(0.0, f - 0.5 * design.window_nm)
     << " nm of the window centre (a window-wide FSR would need n_g <= "
     << design.bands.signal_nm * design.bands.signal_nm / (design.window_nm * design.ring.circumference_um() * 1e3)
     << ")";
  return os.str();
}

double cw_numerical_linewidth(const DeviceDesign& design) {
  const double narrowest = narrowest_resonance_hz(design, true);
  const double floor = kTwoPi * 1e6;
  if (!std::isfinite(narrowest)) return floor;
  return std::max(floor, 0.1 * kTwoPi * narrowest);
}

DesignReport single_resonant_spectrum(const DeviceDesign& design) {
  design.validate();
  if (design.architecture != Architecture::SingleResonant)
    throw InvalidArgument("single_resonant_spectrum needs a single-resonant design");
  const auto comb = signal_resonances_in_window(design);
  if (design.ring.reflectivity_signal > 0.0 && comb.size() != 1) {
    std::ostringstream os;
    os << "architecture violation: " << comb.size() << " signal resonances inside the " << design.window_nm
       << " nm conversion window; the single-resonant design requires exactly one resonance in the "
       << "conversion region";
    if (auto diag = window_fsr_diagnostic(design)) os << " (" << *diag << ")";
    throw ArchitectureViolation(os.str());
  }
  auto rep = build_report(design, false);
  rep.validity.single_signal_resonance = comb.size() == 1;
  if (auto diag = window_fsr_diagnostic(design)) rep.diagnostics.push_back(*diag);
  return rep;
}

DesignReport double_resonant_spectrum(const DeviceDesign& design) {
  design.validate();
  if (design.architecture != Architecture::DoubleResonant)
    throw InvalidArgument("double_resonant_spectrum needs a double-resonant design");

  const auto& ring = design.ring;
  const auto& bands = design.bands;
  std::vector<ResonancePair> pairs;
  std::vector<double> idler_comb;
  const bool both_resonant = ring.reflectivity_signal > 0.0 && ring.reflectivity_idler > 0.0;
  if (both_resonant) {
    const double idler_fsr = fsr(ring, bands.idler, bands.idler_nm);
    idler_comb = resonance_comb(ring, bands.idler, std::max(design.idler_window_min_nm() - idler_fsr, bands.idler.min_nm()),
                                std::min(design.idler_window_max_nm() + idler_fsr, bands.idler.max_nm()));
    const double nu_p = kSpeedOfLightNmPerS / bands.pump_nm;
    for (double ls : signal_resonances_in_window(design)) {
      const double target_nu = kSpeedOfLightNmPerS / ls + nu_p;
      double best_li = 0.0;
      double best_det = std::numeric_limits<double>::infinity();
      for (double li : idler_comb) {
        const double det = kSpeedOfLightNmPerS / li - target_nu;
        if (std::abs(det) < std::abs(best_det)) {
          best_det = det;
          best_li = li;
        }
      }
      if (!std::isfinite(best_det)) continue;
      const double tol = 0.5 * (frequency_linewidth_hz(ring, bands.signal, ls, Band::Signal) +
                                frequency_linewidth_hz(ring, bands.idler, best_li, Band::Idler));
      pairs.push_back({ls, best_li, best_det, tol});
    }
    const auto best = std::min_element(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return std::abs(a.detuning_hz) / a.tolerance_hz < std::abs(b.detuning_hz) / b.tolerance_hz;
    });
    if (best == pairs.end() || std::abs(best->detuning_hz) > best->tolerance_hz) {
      std::ostringstream os;
      os << "no signal/idler resonance pair satisfies energy conservation inside the window";
      if (best != pairs.end())
        os << " (closest pair detuned by " << best->detuning_hz / 1e6 << " MHz, tolerance "
           << best->tolerance_hz / 1e6 << " MHz)";
      os << "; run a double-resonance radius search";
      throw NoConversionPeakError(os.str());
    }
  }

  auto rep = build_report(design, true);
  rep.idler_comb_nm = idler_comb;
  rep.pairs = pairs;
  if (both_resonant) {
    rep.validity.coincidence_found = true;
    const auto best = std::min_element(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return std::abs(a.detuning_hz) / a.tolerance_hz < std::abs(b.detuning_hz) / b.tolerance_hz;
    });
    rep.predicted_peak_nm = best->idler_nm;
    const double fsr_s = kSpeedOfLight / (group_index(bands.signal, bands.signal_nm) * ring.circumference_um() * 1e-6);
    const double fsr_i = kSpeedOfLight / (group_index(bands.idler, bands.idler_nm) * ring.circumference_um() * 1e-6);
    std::ostringstream os;
    os.precision(5);
    os << "signal/idler FSR " << fsr_s / 1e9 << " / " << fsr_i / 1e9 << " GHz, Vernier step "
       << std::abs(fsr_s - fsr_i) / 1e9 << " GHz per mode";
    rep.diagnostics.push_back(os.str());
  }
  return rep;
}

DesignReport analyze(const DeviceDesign& design) {
  return design.architecture == Architecture::SingleResonant ? single_resonant_spectrum(design)
                                                             : double_resonant_spectrum(design);
}

DesignReport compression_report(const DeviceDesign& design, const std::vector<double>& reflectivity_sweep) {
  auto rep = analyze(design);
  const Band band = design.limiting_band();
  for (double r : reflectivity_sweep) {
    DeviceDesign variant = design;
    variant.ring = design.ring.with_reflectivity(band, r);
    const auto row = analyze(variant);
    rep.sweep.push_back(
        {r, row.fwhm_pm, row.loaded_q, row.compression_factor, row.retention.escape, row.retention.total});
  }
  return rep;
}

double reflectivity_for_loaded_q(const DeviceDesign& design, double target_q) {
  if (!(target_q > 0.0)) throw InvalidArgument("target loaded Q must be positive");
  const Band band = design.limiting_band();
  const auto& provider = design.bands.provider(band);
  const double lambda = design.bands.wavelength(band);
  const double a = round_trip_amplitude(design.ring);

  // Lorentzian estimate: the converted photon inherits the limiting band's
  // frequency linewidth.
  const double target_hz = kSpeedOfLightNmPerS / (design.bands.idler_nm * target_q);
  const double fsr_hz = kSpeedOfLight / (group_index(provider, lambda) * design.ring.circumference_um() * 1e-6);
  const double guess = reflectivity_for_finesse(fsr_hz / target_hz, a);

  auto q_at = [&](double r) {
    DeviceDesign variant = design;
    variant.ring = design.ring.with_reflectivity(band, r);
    return analyze(variant).loaded_q;
  };
  auto f = [&](double r) { return std::log(q_at(r) / target_q); };

  double lo = guess;
  double hi = guess;
  double flo = f(lo);
  double fhi = flo;
  const double cap = std::nextafter(1.0 / a, 0.0);
  for (int k = 0; k < 40 && flo > 0.0; ++k) {
    lo = 1.0 - (1.0 - lo) * 1.5;
    if (lo <= 0.0) throw InfeasibleError("loaded Q target below what any reflectivity achieves");
    flo = f(lo);
  }
  for (int k = 0; k < 40 && fhi < 0.0; ++k) {
    hi = std::min(1.0 - (1.0 - hi) / 1.5, std::min(cap, 1.0 - 1e-12));
    fhi = f(hi);
  }
  if (flo > 0.0 || fhi < 0.0) throw InfeasibleError("loaded Q target not bracketed by reachable reflectivities");
  std::uintmax_t iterations = 100;
  auto [x0, x1] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(40), iterations);
  return 0.5 * (x0 + x1);
}

std::vector<RadiusCandidate> search_double_resonance(const BandTriple& bands, const RingSpec& ring, double min_um,
                                                     double max_um, double tolerance) {
  if (!(max_um > min_um)) {
    std::ostringstream os;
    os << "double-resonance search: empty radius range [" << min_um << ", " << max_um << "] um, nothing to scan";
    throw NotFoundError(os.str());
  }
  if (!(ring.reflectivity_signal > 0.0 && ring.reflectivity_idler > 0.0))
    throw InvalidArgument("double-resonance search needs both bands resonant (R > 0)");

  const double ns = refractive_index(bands.signal, bands.signal_nm);
  const double ni = refractive_index(bands.idler, bands.idler_nm);
  // Mode number per um of radius at fixed wavelength.
  const double slope_s = kTwoPi * ns * 1e3 / bands.signal_nm;
  const double slope_i = kTwoPi * ni * 1e3 / bands.idler_nm;
  const double step = 1.0 / (4.0 * std::max(slope_s, slope_i));

  auto finesse_at = [&](double r, Band band) {
    RingSpec trial = ring;
    trial.radius_um = r;
    return finesse(trial.reflectivity(band), round_trip_amplitude(trial));
  };

  struct Offsets {
    double s;
    double i;
  };
  auto offsets = [&](double r, double ks, double ki) {
    return Offsets{(slope_s * r - ks) * finesse_at(r, Band::Signal), (slope_i * r - ki) * finesse_at(r, Band::Idler)};
  };

  std::vector<RadiusCandidate> found;
  RadiusCandidate nearest{0.0, 0, 0, 0.0, 0.0, std::numeric_limits<double>::infinity()};
  const auto intervals = static_cast<long long>(std::ceil((max_um - min_um) / step));
  for (long long j = 0; j < intervals; ++j) {
    const double a = min_um + static_cast<double>(j) * step;
    const double b = std::min(a + step, max_um);
    const double mid = 0.5 * (a + b);
    const double ks = std::round(slope_s * mid);
    const double ki = std::round(slope_i * mid);
    auto objective = [&](double r) {
      const auto o = offsets(r, ks, ki);
      return o.s * o.s + o.i * o.i;
    };
    const auto best = boost::math::tools::brent_find_minima(objective, a, b, 50);
    const auto o = offsets(best.first, ks, ki);
    RadiusCandidate c{best.first, static_cast<long long>(ks), static_cast<long long>(ki), o.s, o.i,
                      std::max(std::abs(o.s), std::abs(o.i))};
    if (c.residual < nearest.residual) nearest = c;
    if (c.residual > tolerance) continue;
    if (!found.empty() && found.back().signal_mode == c.signal_mode && found.back().idler_mode == c.idler_mode) {
      if (c.residual < found.back().residual) found.back() = c;
      continue;
    }
    found.push_back(c);
  }

  if (found.empty()) {
    std::ostringstream os;
    os.precision(8);
    os << "no doubly-resonant radius in [" << min_um << ", " << max_um << "] um within " << tolerance
       << " linewidths; nearest miss r = " << nearest.radius_um << " um (signal offset " << nearest.signal_residual
       << ", idler offset " << nearest.idler_residual << " linewidths)";
    throw NotFoundError(os.str());
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const RadiusCandidate& x, const RadiusCandidate& y) { return x.residual < y.residual; });
  return found;
}

ArrayXd window_mismatch(const BandTriple& bands, double window_nm, double grating_k, Index samples) {
  ArrayXd out(samples);
  for (Index k = 0; k < samples; ++k) {
    const double ls = samples == 1 ? bands.signal_nm
                                   : bands.signal_nm - 0.5 * window_nm +
                                         window_nm * static_cast<double>(k) / static_cast<double>(samples - 1);
    const double li = 1.0 / (1.0 / ls + 1.0 / bands.pump_nm);
    out[k] = phase_mismatch(bands, ls, li, grating_k);
  }
  return out;
}

double window_ripple(const BandTriple& bands, const PolingProfile& profile, double window_nm, Index samples,
                     double steps_per_period) {
  const ArrayXd delta = window_mismatch(bands, window_nm, profile.grating_k(), samples);
  ArrayXd magnitude(samples);
  if (profile.kind == PolingKind::Uniform) {
    for (Index k = 0; k < samples; ++k) magnitude[k] = std::abs(pmf_uniform(delta[k], profile.length_um));
  } else {
    const Index steps = pmf_steps(profile, 0.0, profile.length_um, steps_per_period);
    for (Index k = 0; k < samples; ++k)
      magnitude[k] = std::abs(pmf_segment(profile, delta[k], 0.0, profile.length_um, steps));
  }
  return ripple_of(magnitude);
}

ChirpDesign chirp_for_window(const BandTriple& bands, const PolingProfile& base, double window_nm,
                             double ripple_bound, double margin) {
  base.validate();
  if (window_nm < 0.0) throw InvalidArgument("conversion window must be non-negative");
  if (window_nm == 0.0) {
    auto uniform = PolingProfile::uniform(base.length_um, base.base_period_um, base.grating_sign);
    return {uniform, 0.0, 0.0, 0.0};
  }

  const ArrayXd delta = window_mismatch(bands, window_nm, base.grating_k(), 201);
  const double span = delta.maxCoeff() - delta.minCoeff();
  // Re-centre the grating on the middle of the window's mismatch range.
  const double centre_k = base.grating_k() - 0.5 * (delta.maxCoeff() + delta.minCoeff());
  const double sign = centre_k >= 0.0 ? 1.0 : -1.0;
  const double period = kTwoPi / std::abs(centre_k);

  std::vector<double> margins{margin, 0.25, 1.0, 0.0, 2.0};
  double best_ripple = std::numeric_limits<double>::infinity();
  for (double m : margins) {
    const double kappa = span * (1.0 + m) / base.length_um;
    const double chirp_rate = -kappa * period * period / kTwoPi;
    const auto profile = PolingProfile::linear_chirp(base.length_um, period, chirp_rate, sign);
    const double ripple = window_ripple(bands, profile, window_nm);
    if (ripple <= ripple_bound) return {profile, span, m, ripple};
    best_ripple = std::min(best_ripple, ripple);
  }
  std::ostringstream os;
  os << "chirp design infeasible: best ripple " << best_ripple << " exceeds bound " << ripple_bound
     << " at poled length " << base.length_um << " um";
  throw InfeasibleError(os.str());
}

}  // namespace qfc
