#pragma once

#include "qfc/dispersion.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfc::presets {

// Bulk LiNbO3, Zelmon, Small & Jundt, JOSA B 14, 3319 (1997),
// n^2 - 1 = sum A_k lambda^2 / (lambda^2 - B_k), lambda in um, 0.4-5 um.
DispersionProvider linbo3_congruent_extraordinary();
DispersionProvider linbo3_congruent_ordinary();
DispersionProvider mgo_linbo3_extraordinary();  // 5 mol% MgO
DispersionProvider mgo_linbo3_ordinary();

/// Looks up a bulk material by name ("linbo3_e", "linbo3_o", "mgo_linbo3_e",
/// "mgo_linbo3_o").
std::optional<DispersionProvider> material(std::string_view name);
std::vector<std::string> material_names();

// Effective-index models of a dispersion-engineered LNOI ridge ring. Pump and
// signal run in higher-order modes, the idler in the fundamental mode; the
// pump mode is group-velocity matched to the idler mode. Values are
// representative of thin-film LN ridges, not the output of a mode solve.
DispersionProvider lnoi_signal_mode();
DispersionProvider lnoi_pump_mode();
DispersionProvider lnoi_idler_mode();

/// 1550 nm signal -> 780 nm idler on the LNOI-like modes.
BandTriple lnoi_bands(double signal_nm = 1550.0, double idler_nm = 780.0);

/// Named preset provider for a band ("lnoi_signal", "lnoi_pump", "lnoi_idler").
std::optional<DispersionProvider> mode(std::string_view name);

/// State-of-the-art-like LNOI propagation loss, dB/m.
inline constexpr double kLnoiLossDbPerM = 2.7;

}  // namespace qfc::presets
