#include "qfc/presets.hpp"

namespace qfc::presets {

namespace {

DispersionProvider zelmon(std::vector<double> strengths, std::vector<double> poles, const char* axis) {
  return DispersionProvider::sellmeier(SellmeierModel::from_resonance_form(strengths, poles), 400.0, 5000.0, axis);
}

DispersionProvider quadratic_mode(double center_nm, double n_eff, double n_group, double curvature,
                                  double min_nm, double max_nm, const char* label) {
  // n_g = n - lambda dn/dlambda at the reference wavelength
  const double slope = (n_eff - n_group) / center_nm;
  return DispersionProvider::polynomial(PolynomialModel{{n_eff, slope, curvature}, center_nm}, min_nm, max_nm,
                                        label);
}

}  // namespace

DispersionProvider linbo3_congruent_extraordinary() {
  return zelmon({2.9804, 0.5981, 8.9543}, {0.02047, 0.0666, 416.08}, "extraordinary");
}

DispersionProvider linbo3_congruent_ordinary() {
  return zelmon({2.6734, 1.2290, 12.614}, {0.01764, 0.05914, 474.60}, "ordinary");
}

DispersionProvider mgo_linbo3_extraordinary() {
  return zelmon({2.2454, 1.3005, 6.8972}, {0.01242, 0.05313, 331.33}, "extraordinary");
}

DispersionProvider mgo_linbo3_ordinary() {
  return zelmon({2.4272, 1.4617, 9.6536}, {0.01478, 0.05612, 371.216}, "ordinary");
}

std::optional<DispersionProvider> material(std::string_view name) {
  if (name == "linbo3_e") return linbo3_congruent_extraordinary();
  if (name == "linbo3_o") return linbo3_congruent_ordinary();
  if (name == "mgo_linbo3_e") return mgo_linbo3_extraordinary();
  if (name == "mgo_linbo3_o") return mgo_linbo3_ordinary();
  return std::nullopt;
}

std::vector<std::string> material_names() { return {"linbo3_e", "linbo3_o", "mgo_linbo3_e", "mgo_linbo3_o"}; }

DispersionProvider lnoi_signal_mode() {
  return quadratic_mode(1550.0, 1.80, 2.200, 1e-8, 1400.0, 1700.0, "lnoi higher-order (signal)");
}

DispersionProvider lnoi_pump_mode() {
  return quadratic_mode(1570.13, 1.85, 2.281, 1e-8, 1400.0, 1750.0, "lnoi higher-order (pump)");
}

DispersionProvider lnoi_idler_mode() {
  return quadratic_mode(780.0, 2.10, 2.280, 5e-8, 700.0, 860.0, "lnoi fundamental (idler)");
}

BandTriple lnoi_bands(double signal_nm, double idler_nm) {
  return BandTriple::from_signal_idler(signal_nm, idler_nm, lnoi_pump_mode(), lnoi_signal_mode(),
                                       lnoi_idler_mode());
}

std::optional<DispersionProvider> mode(std::string_view name) {
  if (name == "lnoi_signal") return lnoi_signal_mode();
  if (name == "lnoi_pump") return lnoi_pump_mode();
  if (name == "lnoi_idler") return lnoi_idler_mode();
  return std::nullopt;
}

}  // namespace qfc::presets
