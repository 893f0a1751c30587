#pragma once

#include "qfc/types.hpp"

#include <string>
#include <variant>
#include <vector>

namespace qfc {

/// n^2(lambda) = a + sum_k b_k / (lambda^2 - c_k) - d * lambda^2, lambda in um.
struct SellmeierModel {
  double a = 1.0;
  std::vector<double> b;
  std::vector<double> c;  // um^2
  double d = 0.0;         // um^-2

  /// Converts the common n^2 - 1 = sum_k A_k lambda^2 / (lambda^2 - B_k) layout.
  static SellmeierModel from_resonance_form(const std::vector<double>& strengths,
                                            const std::vector<double>& poles_um2);
};

/// Effective index sampled on a strictly increasing wavelength grid.
struct TabulatedModel {
  std::vector<double> wavelength_nm;
  std::vector<double> index;
  int order = 3;  // 1 (linear) or 3 (monotone-safe cubic Hermite)
};

/// n(lambda) = sum_k coefficients[k] * (lambda - reference_nm)^k.
struct PolynomialModel {
  std::vector<double> coefficients;
  double reference_nm = 0.0;
};

enum class DispersionKind { Sellmeier, Tabulated, Polynomial };

/// Wavelength -> effective refractive index over a closed validity range.
/// Immutable once built; every query is a pure function of (provider, lambda).
class DispersionProvider {
 public:
  using Model = std::variant<SellmeierModel, TabulatedModel, PolynomialModel>;

  DispersionProvider(Model model, double min_nm, double max_nm, std::string axis = {});

  static DispersionProvider sellmeier(SellmeierModel model, double min_nm, double max_nm,
                                      std::string axis = "extraordinary");
  static DispersionProvider tabulated(TabulatedModel model, std::string axis = {});
  static DispersionProvider polynomial(PolynomialModel model, double min_nm, double max_nm,
                                       std::string axis = {});
  static DispersionProvider constant(double n, double min_nm = 1.0, double max_nm = 1.0e5);

  DispersionKind kind() const;
  const Model& model() const { return model_; }
  double min_nm() const { return min_nm_; }
  double max_nm() const { return max_nm_; }
  const std::string& axis() const { return axis_; }

  bool contains(double lambda_nm) const { return lambda_nm >= min_nm_ && lambda_nm <= max_nm_; }

  /// Model evaluation without range checking.
  double evaluate(double lambda_nm) const;

 private:
  void validate() const;

  Model model_;
  double min_nm_;
  double max_nm_;
  std::string axis_;
  std::vector<double> node_slopes_;  // Hermite node derivatives for cubic tables
};

double refractive_index(const DispersionProvider& provider, double lambda_nm);
ArrayXd refractive_index(const DispersionProvider& provider, const ArrayXd& lambda_nm);

/// Central-difference step used for dn/dlambda.
inline double group_index_step(double lambda_nm) { return std::max(0.1, 1e-4 * lambda_nm); }

/// n_g = n - lambda dn/dlambda.
double group_index(const DispersionProvider& provider, double lambda_nm);

/// beta = 2 pi n / lambda in rad/um.
double propagation_constant(const DispersionProvider& provider, double lambda_nm);

/// d beta / d omega in s/um, i.e. n_g / c.
double inverse_group_velocity(const DispersionProvider& provider, double lambda_nm);

/// Pump, signal and idler wavelengths tied by 1/lambda_p + 1/lambda_s = 1/lambda_i.
struct BandTriple {
  double pump_nm;
  double signal_nm;
  double idler_nm;
  DispersionProvider pump;
  DispersionProvider signal;
  DispersionProvider idler;

  /// Derives the pump wavelength from energy conservation.
  static BandTriple from_signal_idler(double signal_nm, double idler_nm, DispersionProvider pump,
                                      DispersionProvider signal, DispersionProvider idler);

  const DispersionProvider& provider(Band band) const;
  double wavelength(Band band) const;
};

/// 1/lambda_p from 1/lambda_i - 1/lambda_s.
double pump_wavelength_for(double signal_nm, double idler_nm);

}  // namespace qfc
