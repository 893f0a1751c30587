#pragma once

#include "qfc/dispersion.hpp"
#include "qfc/types.hpp"

#include <vector>

namespace qfc {

/// All-pass ring with one output coupler per band.
///
/// The output-coupler reflectivity R is the field self-coupling t of the
/// standard all-pass relations; R = 0 marks a band that is not confined.
struct RingSpec {
  double radius_um = 0.0;
  double reflectivity_signal = 0.0;
  double reflectivity_idler = 0.0;
  double loss_db_per_m = 0.0;
  double in_coupling = 1.0;
  double out_coupling = 1.0;

  double circumference_um() const { return kTwoPi * radius_um; }
  double reflectivity(Band band) const;
  RingSpec with_reflectivity(Band band, double r) const;
  void validate() const;
};

/// Field amplitude surviving one round trip, 10^(-alpha L / 20).
double round_trip_amplitude(const RingSpec& ring, double lambda_nm = 0.0);

/// lambda^2 / (n_g L), in nm.
double fsr(const RingSpec& ring, const DispersionProvider& provider, double lambda_nm);

/// n_eff(lambda) L / lambda.
double mode_number(const DispersionProvider& provider, double circumference_um, double lambda_nm);

/// Every wavelength in [min_nm, max_nm] where the mode number is an integer,
/// ascending.
std::vector<double> resonance_comb(const RingSpec& ring, const DispersionProvider& provider, double min_nm,
                                   double max_nm);

struct RingTransfer {
  Complex buildup;      // kappa / (1 - t a e^{i phi})
  double transmission;  // |(t - a e^{i phi}) / (1 - t a e^{i phi})|^2
};

RingTransfer transfer_function(const RingSpec& ring, const DispersionProvider& provider, double lambda_nm,
                               Band band);

/// Closed forms for given self-coupling t and round-trip amplitude a.
template <typename Scalar>
std::complex<Scalar> allpass_buildup(Scalar t, Scalar a, Scalar round_trip_phase) {
  const Scalar kappa = std::sqrt(Scalar(1) - t * t);
  return kappa / (Scalar(1) - t * a * std::polar(Scalar(1), round_trip_phase));
}

template <typename Scalar>
Scalar allpass_transmission(Scalar t, Scalar a, Scalar round_trip_phase) {
  const auto e = std::polar(Scalar(1), round_trip_phase);
  return std::norm((t - a * e) / (Scalar(1) - t * a * e));
}

template <typename Scalar>
Scalar finesse(Scalar t, Scalar a) {
  const Scalar ta = t * a;
  return std::numbers::pi_v<Scalar> * std::sqrt(ta) / (Scalar(1) - ta);
}

struct Linewidth {
  double fwhm_pm;
  double loaded_q;
  double finesse;
  double fsr_nm;
  double numerical_fwhm_pm;  // half-max scan of |build-up|^2
};

/// Finesse-based FWHM and loaded Q at a comb member, with a numerical
/// half-maximum scan of |build-up|^2 reported alongside.
Linewidth linewidth_q(const RingSpec& ring, const DispersionProvider& provider, double resonance_nm, Band band);

/// Half-maximum width of |build-up|^2 around a resonance, in nm.
double numerical_fwhm(const RingSpec& ring, const DispersionProvider& provider, double resonance_nm, Band band);

/// Probability a photon in the ring leaves through the output coupler rather
/// than through propagation loss: kappa^2 / (kappa^2 + 1 - a^2).
double escape_probability(const RingSpec& ring, Band band);

/// Self-coupling t giving the requested finesse at round-trip amplitude a.
double reflectivity_for_finesse(double target_finesse, double a);

struct Resonance {
  double center_nm;
  double fwhm_pm;
  double loaded_q;
  double finesse;
};

struct RingResponse {
  ArrayXd wavelength_nm;
  ArrayXcd buildup;
  ArrayXd transmission;
  std::vector<Resonance> resonances;
};

RingResponse ring_response(const RingSpec& ring, const DispersionProvider& provider, Band band, double min_nm,
                           double max_nm, Index points);

/// Radius closest to `radius_um` that places a resonance exactly at lambda_nm.
double radius_for_resonance(const DispersionProvider& provider, double lambda_nm, double radius_um);

}  // namespace qfc
