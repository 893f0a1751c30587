#pragma once

#include "qfc/conversion.hpp"
#include "qfc/design.hpp"
#include "qfc/dispersion.hpp"
#include "qfc/qpm.hpp"
#include "qfc/resonator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qfc {

inline constexpr const char* kConfigSchema = "qfc-config/1";

struct DesignSection {
  Architecture architecture = Architecture::SingleResonant;
  double window_nm = 5.0;
  double input_fwhm_nm = 5.0;
  double eta_tau = kPi / 2.0;
  std::optional<double> target_loaded_q;  // calibrates R of the limiting band
  std::vector<double> reflectivity_sweep{0.9, 0.95, 0.99, 0.999};
  double ripple_bound = 0.2;
  double search_min_um = 0.0;
  double search_max_um = 0.0;
  double search_tolerance = 0.5;
};

struct NumericsSection {
  Index grid_points = 512;
  double span_factor = 3.0;
  Index propagation_bins = 128;
  Index slices = 256;
  double steps_per_period = 20.0;
  std::optional<double> coupling;  // eta for propagate; default eta_tau / (2L/pi)
  PhaseModulation modulation;
  double points_per_fwhm = 20.0;
  Index max_points = 4'000'000;
};

/// Wavelength band sampled by the dispersion and ring commands.
struct ScanSection {
  Band band = Band::Signal;
  std::optional<double> min_nm;  // default: conversion window of the band
  std::optional<double> max_nm;
  Index points = 2001;
};

/// Fully validated run configuration.
struct Config {
  explicit Config(BandTriple b) : bands(std::move(b)) {}

  std::string schema;
  std::filesystem::path source;
  std::string hash;  // SHA-256 over the config text and every table it references

  BandTriple bands;
  RingSpec ring;
  std::optional<PolingProfile> poling;  // empty when the bands need no grating
  PumpSpec pump;
  DesignSection design;
  NumericsSection numerics;
  ScanSection scan;

  /// The analysed device; throws ConfigError when the poling is undefined.
  DeviceDesign device(int threads = 1) const;
  const PolingProfile& require_poling() const;
  double coupling() const;
};

/// Parses and validates a config file. Parse errors carry path:line:column,
/// validation errors name section.key and the violated bound.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::filesystem::path& origin = "<memory>");

/// Two-column table file (wavelength nm, n_eff); '#' starts a comment.
TabulatedModel read_index_table(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

}  // namespace qfc
