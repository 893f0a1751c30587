#pragma once

#include "qfc/conversion.hpp"
#include "qfc/dispersion.hpp"
#include "qfc/qpm.hpp"
#include "qfc/resonator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qfc {

enum class Architecture { SingleResonant, DoubleResonant };

std::string_view to_string(Architecture a);

struct SpectrumOptions {
  double points_per_fwhm = 20.0;
  Index max_points = 4'000'000;
  double steps_per_period = 20.0;
  int threads = 1;
};

struct DeviceDesign {
  explicit DeviceDesign(BandTriple b) : bands(std::move(b)) {}

  Architecture architecture = Architecture::SingleResonant;
  RingSpec ring;
  PolingProfile poling;
  PumpSpec pump;
  BandTriple bands;
  double window_nm = 5.0;       // conversion window centred on the signal wavelength
  double input_fwhm_nm = 5.0;   // transform-limited Gaussian input photon
  double eta_tau = kPi / 2.0;   // calibrated conversion operating point
  SpectrumOptions numerics;

  void validate() const;
  double signal_window_min_nm() const { return bands.signal_nm - 0.5 * window_nm; }
  double signal_window_max_nm() const { return bands.signal_nm + 0.5 * window_nm; }
  /// Idler wavelengths reached from the signal window with the cw pump.
  double idler_window_min_nm() const;
  double idler_window_max_nm() const;
  /// Band whose output coupler sets the converted photon's linewidth.
  Band limiting_band() const { return architecture == Architecture::SingleResonant ? Band::Signal : Band::Idler; }
};

/// Effective idler generation spectrum sampled on an idler angular-frequency
/// axis; `value` is normalised to its largest sample.
struct EffectiveSpectrum {
  ArrayXd idler_omega;
  ArrayXd idler_nm;
  ArrayXd signal_nm;
  ArrayXd value;
  ArrayXd signal_buildup;  // |B_s|^2 at omega_i - omega_p
  ArrayXd idler_buildup;   // |B_i|^2 at omega_i (1 when the idler is not confined)
  ArrayXd pmf;             // |PTF|^2 along energy conservation
  ArrayXd input;           // |input|^2
};

struct RetentionBreakdown {
  double in_coupling = 1.0;
  double conversion = 1.0;
  double escape = 1.0;
  double out_coupling = 1.0;
  double total = 1.0;
};

struct ResonancePair {
  double signal_nm;
  double idler_nm;        // nearest idler resonance to signal + pump
  double detuning_hz;     // idler resonance minus (signal resonance + pump)
  double tolerance_hz;    // half the summed linewidths
};

struct ValidityFlags {
  std::optional<bool> single_signal_resonance;  // single-resonant condition (1)
  std::optional<bool> coincidence_found;        // double-resonant energy-matched pair
};

struct SweepRow {
  double reflectivity;
  double fwhm_pm;
  double loaded_q;
  double compression_factor;
  double escape;
  double retention;
};

struct DesignReport {
  Architecture architecture = Architecture::SingleResonant;
  std::vector<double> signal_comb_nm;
  std::vector<double> idler_comb_nm;
  std::vector<ResonancePair> pairs;
  EffectiveSpectrum spectrum;

  double peak_nm = 0.0;
  double peak_omega = 0.0;
  double fwhm_pm = 0.0;
  double fwhm_hz = 0.0;
  double loaded_q = 0.0;
  std::optional<double> cavity_fwhm_pm;
  std::optional<double> cavity_q;
  Index peak_count = 0;
  Index dominant_peaks = 0;  // peaks within 3 dB of the largest
  std::optional<double> side_suppression_db;
  std::optional<double> predicted_peak_nm;

  double input_fwhm_nm = 0.0;
  double compression_factor = 0.0;     // input FWHM / output FWHM, both in wavelength
  double frequency_compression = 0.0;  // same ratio in optical frequency
  RetentionBreakdown retention;
  double pmf_ripple = 0.0;
  ValidityFlags validity;
  std::vector<std::string> diagnostics;
  std::vector<SweepRow> sweep;
};

/// Unnormalised effective spectrum S(omega_i) and its factors.
class SpectrumModel {
 public:
  struct Terms {
    double signal_buildup;
    double idler_buildup;
    double pmf;
    double input;
    double total;
  };

  SpectrumModel(const DeviceDesign& design, bool idler_resonant);
  Terms at(double idler_omega) const;
  double operator()(double idler_omega) const { return at(idler_omega).total; }
  double pump_omega() const { return pump_omega_; }

 private:
  const DeviceDesign& design_;
  bool idler_resonant_;
  double pump_omega_;
  double input_center_;
  double input_width_;
  Index pmf_steps_ = 0;
};

/// Signal resonances inside the conversion window.
std::vector<double> signal_resonances_in_window(const DeviceDesign& design);

/// Reports the FSR / window tension when the signal FSR is narrower than the
/// window, empty otherwise.
std::optional<std::string> window_fsr_diagnostic(const DeviceDesign& design);

/// Numerical cw linewidth: a tenth of the narrowest resonance, floor 1 MHz.
double cw_numerical_linewidth(const DeviceDesign& design);

DesignReport single_resonant_spectrum(const DeviceDesign& design);
DesignReport double_resonant_spectrum(const DeviceDesign& design);

/// Dispatches on the architecture.
DesignReport analyze(const DeviceDesign& design);

/// analyze plus the output-coupler reflectivity trade-off sweep on the
/// limiting band.
DesignReport compression_report(const DeviceDesign& design, const std::vector<double>& reflectivity_sweep);

/// Reflectivity of the limiting band giving the requested effective loaded Q
/// at the idler (lambda_i / FWHM of the converted photon).
double reflectivity_for_loaded_q(const DeviceDesign& design, double target_q);

struct RadiusCandidate {
  double radius_um;
  long long signal_mode;
  long long idler_mode;
  double signal_residual;  // fractional mode offset in linewidths
  double idler_residual;
  double residual;         // max of the two
};

/// Radii where the signal and idler wavelengths are simultaneously resonant
/// to within `tolerance` linewidths, sorted by residual.
std::vector<RadiusCandidate> search_double_resonance(const BandTriple& bands, const RingSpec& ring, double min_um,
                                                     double max_um, double tolerance = 0.5);

struct ChirpDesign {
  PolingProfile profile;
  double mismatch_span;  // rad/um across the window
  double margin;
  double ripple;
};

/// Phase mismatch against `grating_k` along energy conservation at the
/// signal-window sample wavelengths.
ArrayXd window_mismatch(const BandTriple& bands, double window_nm, double grating_k, Index samples);

/// max | |PMF| / mean - 1 | over the window.
double window_ripple(const BandTriple& bands, const PolingProfile& profile, double window_nm, Index samples = 201,
                     double steps_per_period = 20.0);

/// Linear chirp whose grating sweep covers the window's mismatch range and
/// keeps |PMF| within `ripple_bound` of its window mean.
ChirpDesign chirp_for_window(const BandTriple& bands, const PolingProfile& base, double window_nm,
                             double ripple_bound = 0.2, double margin = 0.5);

}  // namespace qfc
