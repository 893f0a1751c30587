#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string_view>

namespace qfc {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using ArrayXd = Eigen::ArrayXd;
using ArrayXcd = Eigen::ArrayXcd;
using MatrixXd = Eigen::MatrixXd;
using MatrixXcd = Eigen::MatrixXcd;

// Internal units: wavelengths in vacuum nm, lengths in um, angular frequencies
// in rad/s, propagation constants in rad/um.
inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kSpeedOfLightNmPerS = 2.99792458e17;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double omega_from_wavelength(double lambda_nm) { return kTwoPi * kSpeedOfLightNmPerS / lambda_nm; }
inline double wavelength_from_omega(double omega) { return kTwoPi * kSpeedOfLightNmPerS / omega; }

/// Width conversion between wavelength and angular frequency around a carrier.
inline double omega_width_from_nm(double width_nm, double lambda_nm) {
  return kTwoPi * kSpeedOfLightNmPerS * width_nm / (lambda_nm * lambda_nm);
}
inline double nm_width_from_omega(double width_omega, double lambda_nm) {
  return width_omega * lambda_nm * lambda_nm / (kTwoPi * kSpeedOfLightNmPerS);
}

/// sin(x)/x with the removable singularity filled in.
template <typename Scalar>
Scalar sinc(Scalar x) {
  using std::abs;
  using std::sin;
  if (abs(x) < Scalar(1e-4)) {
    const Scalar x2 = x * x;
    return Scalar(1) - x2 / Scalar(6) + x2 * x2 / Scalar(120);
  }
  return sin(x) / x;
}

enum class Band { Pump, Signal, Idler };

inline std::string_view to_string(Band band) {
  switch (band) {
    case Band::Pump: return "pump";
    case Band::Signal: return "signal";
    case Band::Idler: return "idler";
  }
  return "?";
}

/// Uniformly spaced, strictly increasing axis. Values are start + k * step so
/// a serialized (start, step, count) triple reproduces every node exactly.
struct UniformAxis {
  double start = 0.0;
  double step = 1.0;
  Index count = 0;

  double operator[](Index k) const { return start + static_cast<double>(k) * step; }
  double front() const { return start; }
  double back() const { return (*this)[count - 1]; }
  double center() const { return 0.5 * (front() + back()); }
  double span() const { return back() - front(); }

  ArrayXd values() const {
    ArrayXd v(count);
    for (Index k = 0; k < count; ++k) v[k] = (*this)[k];
    return v;
  }

  /// count points centred on `center` with spacing `step`.
  static UniformAxis centered(double center, double step, Index count) {
    return {center - 0.5 * static_cast<double>(count - 1) * step, step, count};
  }

  friend bool operator==(const UniformAxis&, const UniformAxis&) = default;
};

}  // namespace qfc
