#include "qfc/config.hpp"

#include "qfc/errors.hpp"
#include "qfc/presets.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace qfc {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;
  bool used = false;
};

const std::set<std::string>& known_sections() {
  static const std::set<std::string> s{"",       "bands",  "dispersion.pump", "dispersion.signal",
                                       "dispersion.idler", "ring", "poling", "pump", "design", "numerics",
                                       "scan"};
  return s;
}

const std::set<std::string>& dispersion_keys() {
  static const std::set<std::string> s{"kind", "name", "a",     "b",     "c",    "d",  "table",
                                       "order", "coefficients", "reference_nm", "min_nm", "max_nm", "axis", "n"};
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Document {
 public:
  Document(const std::string& text, std::filesystem::path origin) : origin_(std::move(origin)) { parse(text); }

  const std::filesystem::path& origin() const { return origin_; }

  bool has_section(const std::string& s) const { return sections_.count(s) != 0; }

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::string where(const Entry& e) const {
    std::ostringstream os;
    os << origin_.string() << ":" << e.line << ":" << e.column;
    return os.str();
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) {
    auto it = entries_.find(key);
    std::ostringstream os;
    if (it != entries_.end())
      os << where(it->second) << ": " << key << " = " << it->second.value << ": " << message;
    else
      os << origin_.string() << ": " << key << ": " << message;
    throw ConfigError(os.str());
  }

  std::optional<std::string> text(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> number(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return to_double(key, e->value);
  }

  std::optional<Index> integer(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    long long v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(key, "expected an integer");
    return static_cast<Index>(v);
  }

  std::optional<bool> boolean(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    fail(key, "expected true or false");
  }

  std::optional<std::vector<double>> list(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail(key, "empty list element");
      out.push_back(to_double(key, item));
    }
    if (out.empty()) fail(key, "expected a comma-separated list of numbers");
    return out;
  }

  double required_number(const std::string& key) {
    auto v = number(key);
    if (!v) missing(key);
    return *v;
  }

  std::string required_text(const std::string& key) {
    auto v = text(key);
    if (!v) missing(key);
    return *v;
  }

  [[noreturn]] void missing(const std::string& key) {
    throw ConfigError(origin_.string() + ": missing required key " + key);
  }

  void reject_unused() const {
    for (const auto& [key, e] : entries_) {
      if (e.used) continue;
      const auto dot = key.rfind('.');
      const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
      const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
      std::ostringstream os;
      os << where(e) << ": ";
      if (section.rfind("dispersion.", 0) == 0 && dispersion_keys().count(name))
        os << "key " << key << " does not apply to this dispersion kind";
      else
        os << "unknown key " << key;
      throw ConfigError(os.str());
    }
  }

 private:
  double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = first + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(key, "expected a finite number");
    return v;
  }

  void parse(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    auto error = [&](int column, const std::string& msg) {
      std::ostringstream os;
      os << origin_.string() << ":" << line_no << ":" << column << ": " << msg;
      throw ConfigError(os.str());
    };
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line(raw);
      const auto comment = line.find_first_of("#;");
      if (comment != std::string_view::npos) line = line.substr(0, comment);
      const std::string body = trim(line);
      if (body.empty()) continue;
      const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
      if (body.front() == '[') {
        if (body.back() != ']') error(indent, "unterminated section header");
        section = trim(std::string_view(body).substr(1, body.size() - 2));
        if (!known_sections().count(section) || section.empty())
          error(indent + 1, "unknown section [" + section + "]");
        if (sections_.count(section)) error(indent + 1, "duplicate section [" + section + "]");
        sections_.insert(section);
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) error(indent, "expected key = value");
      const std::string key = trim(std::string_view(body).substr(0, eq));
      const std::string value = trim(std::string_view(body).substr(eq + 1));
      if (key.empty()) error(indent, "empty key");
      const bool valid_name = std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
      });
      if (!valid_name) error(indent, "invalid key name '" + key + "'");
      if (value.empty()) error(indent + static_cast<int>(eq) + 1, "missing value for " + key);
      const std::string full = section.empty() ? key : section + "." + key;
      if (entries_.count(full)) error(indent, "duplicate key " + full);
      entries_[full] = Entry{value, line_no, indent};
    }
  }

  std::filesystem::path origin_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> sections_;
};

void require(Document& doc, bool ok, const std::string& key, const std::string& message) {
  if (!ok) doc.fail(key, message);
}

DispersionProvider load_provider(Document& doc, const std::string& band, std::string& hash_input) {
  const std::string s = "dispersion." + band;
  if (!doc.has_section(s)) throw ConfigError(doc.origin().string() + ": missing section [" + s + "]");
  const std::string kind = doc.required_text(s + ".kind");
  auto range = [&](double lo_default, double hi_default) {
    const double lo = doc.number(s + ".min_nm").value_or(lo_default);
    const double hi = doc.number(s + ".max_nm").value_or(hi_default);
    require(doc, lo > 0.0, s + ".min_nm", "must be positive");
    require(doc, hi > lo, s + ".max_nm", "must exceed min_nm (valid range must be non-empty)");
    return std::pair{lo, hi};
  };
  try {
    if (kind == "preset") {
      const std::string name = doc.required_text(s + ".name");
      if (auto p = presets::material(name)) return *p;
      if (auto p = presets::mode(name)) return *p;
      doc.fail(s + ".name", "unknown preset");
    }
    if (kind == "constant") {
      const double n = doc.required_number(s + ".n");
      require(doc, n > 1.0, s + ".n", "refractive index must exceed 1");
      const auto [lo, hi] = range(1.0, 1.0e5);
      PolynomialModel m{{n}, 0.0};
      return DispersionProvider::polynomial(m, lo, hi, doc.text(s + ".axis").value_or(""));
    }
    if (kind == "sellmeier") {
      SellmeierModel m;
      m.a = doc.required_number(s + ".a");
      m.b = doc.list(s + ".b").value_or(std::vector<double>{});
      m.c = doc.list(s + ".c").value_or(std::vector<double>{});
      m.d = doc.number(s + ".d").value_or(0.0);
      require(doc, m.b.size() == m.c.size(), s + ".c", "needs one pole per b coefficient");
      const auto [lo, hi] = range(0.0, 0.0);
      return DispersionProvider::sellmeier(m, lo, hi, doc.text(s + ".axis").value_or("extraordinary"));
    }
    if (kind == "polynomial") {
      PolynomialModel m;
      const auto coefficients = doc.list(s + ".coefficients");
      if (!coefficients) doc.missing(s + ".coefficients");
      m.coefficients = *coefficients;
      m.reference_nm = doc.number(s + ".reference_nm").value_or(0.0);
      const auto [lo, hi] = range(0.0, 0.0);
      return DispersionProvider::polynomial(m, lo, hi, doc.text(s + ".axis").value_or(""));
    }
    if (kind == "tabulated") {
      const std::string rel = doc.required_text(s + ".table");
      std::filesystem::path path(rel);
      if (path.is_relative()) path = doc.origin().parent_path() / path;
      std::ifstream in(path, std::ios::binary);
      if (!in) doc.fail(s + ".table", "table file not found: " + path.string());
      std::ostringstream bytes;
      bytes << in.rdbuf();
      hash_input += "\n#table " + rel + "\n" + bytes.str();
      TabulatedModel m = read_index_table(path);
      const auto order = doc.integer(s + ".order").value_or(3);
      require(doc, order == 1 || order == 3, s + ".order", "interpolation order must be 1 or 3");
      m.order = static_cast<int>(order);
      return DispersionProvider::tabulated(m, doc.text(s + ".axis").value_or(""));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    doc.fail(s + ".kind", e.what());
  }
  doc.fail(s + ".kind", "expected preset, constant, sellmeier, polynomial or tabulated");
}

Band parse_band(Document& doc, const std::string& key, const std::string& v) {
  if (v == "signal") return Band::Signal;
  if (v == "idler") return Band::Idler;
  if (v == "pump") return Band::Pump;
  doc.fail(key, "expected signal, idler or pump");
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < length; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
  return os.str();
}

TabulatedModel read_index_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open index table " + path.string());
  TabulatedModel m;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::replace(raw.begin(), raw.end(), ',', ' ');
    std::replace(raw.begin(), raw.end(), '\t', ' ');
    std::istringstream row(raw);
    double wl = 0.0;
    double n = 0.0;
    if (!(row >> wl)) continue;
    std::string extra;
    if (!(row >> n) || (row >> extra)) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": expected two columns (wavelength nm, n_eff)";
      throw ConfigError(os.str());
    }
    if (!m.wavelength_nm.empty() && !(wl > m.wavelength_nm.back())) {
      std::ostringstream os;
      os << path.string() << ":" << line_no << ": wavelengths must be strictly increasing";
      throw ConfigError(os.str());
    }
    m.wavelength_nm.push_back(wl);
    m.index.push_back(n);
  }
  if (m.wavelength_nm.size() < 2) throw ConfigError(path.string() + ": index table needs at least two rows");
  return m;
}

Config parse_config(const std::string& text, const std::filesystem::path& origin) {
  Document doc(text, origin);
  std::string hash_input = text;

  const auto schema = doc.text("schema");
  if (!schema) doc.missing("schema");
  if (*schema != kConfigSchema) doc.fail("schema", std::string("unsupported schema, expected ") + kConfigSchema);

  const double signal_nm = doc.required_number("bands.signal_nm");
  const double idler_nm = doc.required_number("bands.idler_nm");
  require(doc, signal_nm > 0.0, "bands.signal_nm", "must be positive");
  require(doc, idler_nm > 0.0 && idler_nm < signal_nm, "bands.idler_nm",
          "must be positive and shorter than the signal wavelength (sum-frequency generation)");

  auto pump_p = load_provider(doc, "pump", hash_input);
  auto signal_p = load_provider(doc, "signal", hash_input);
  auto idler_p = load_provider(doc, "idler", hash_input);
  Config cfg(BandTriple::from_signal_idler(signal_nm, idler_nm, pump_p, signal_p, idler_p));
  cfg.schema = *schema;
  cfg.source = origin;
  for (Band b : {Band::Pump, Band::Signal, Band::Idler}) {
    const auto& p = cfg.bands.provider(b);
    const double l = cfg.bands.wavelength(b);
    if (!p.contains(l)) {
      std::ostringstream os;
      os << origin.string() << ": dispersion." << to_string(b) << ": " << l << " nm outside the provider range ["
         << p.min_nm() << ", " << p.max_nm() << "] nm";
      throw ConfigError(os.str());
    }
  }

  // [design]
  auto& ds = cfg.design;
  if (auto a = doc.text("design.architecture")) {
    if (*a == "single") ds.architecture = Architecture::SingleResonant;
    else if (*a == "double") ds.architecture = Architecture::DoubleResonant;
    else doc.fail("design.architecture", "expected single or double");
  }
  ds.window_nm = doc.number("design.window_nm").value_or(ds.window_nm);
  require(doc, ds.window_nm > 0.0, "design.window_nm", "must be positive");
  ds.input_fwhm_nm = doc.number("design.input_fwhm_nm").value_or(ds.input_fwhm_nm);
  require(doc, ds.input_fwhm_nm > 0.0, "design.input_fwhm_nm", "must be positive");
  const auto eta_tau = doc.number("design.eta_tau");
  const auto probability = doc.number("design.conversion_probability");
  if (eta_tau && probability) doc.fail("design.conversion_probability", "set either eta_tau or conversion_probability");
  if (eta_tau) {
    require(doc, *eta_tau >= 0.0, "design.eta_tau", "must be non-negative");
    ds.eta_tau = *eta_tau;
  }
  if (probability) {
    require(doc, *probability >= 0.0 && *probability <= 1.0, "design.conversion_probability", "must lie in [0, 1]");
    ds.eta_tau = interaction_for_probability(*probability);
  }
  ds.target_loaded_q = doc.number("design.target_loaded_q");
  if (ds.target_loaded_q) require(doc, *ds.target_loaded_q > 0.0, "design.target_loaded_q", "must be positive");
  if (auto sweep = doc.list("design.r_sweep")) {
    for (double r : *sweep) require(doc, r >= 0.0 && r < 1.0, "design.r_sweep", "entries must lie in [0, 1)");
    ds.reflectivity_sweep = *sweep;
  }
  ds.ripple_bound = doc.number("design.ripple_bound").value_or(ds.ripple_bound);
  require(doc, ds.ripple_bound > 0.0, "design.ripple_bound", "must be positive");
  ds.search_min_um = doc.number("design.search_min_um").value_or(0.0);
  ds.search_max_um = doc.number("design.search_max_um").value_or(0.0);
  require(doc, ds.search_min_um >= 0.0, "design.search_min_um", "must be non-negative");
  require(doc, ds.search_max_um >= 0.0, "design.search_max_um", "must be non-negative");
  ds.search_tolerance = doc.number("design.search_tolerance").value_or(ds.search_tolerance);
  require(doc, ds.search_tolerance > 0.0, "design.search_tolerance", "must be positive");

  // [ring]
  auto& ring = cfg.ring;
  ring.radius_um = doc.required_number("ring.radius_um");
  require(doc, ring.radius_um > 0.0, "ring.radius_um", "must be positive");
  ring.reflectivity_signal = doc.number("ring.R_signal").value_or(0.0);
  ring.reflectivity_idler = doc.number("ring.R_idler").value_or(0.0);
  for (const char* key : {"ring.R_signal", "ring.R_idler"}) {
    const double r = doc.number(key).value_or(0.0);
    require(doc, r >= 0.0 && r < 1.0, key, "outside bound (0, 1) (0 marks a non-resonant band)");
  }
  ring.loss_db_per_m = doc.number("ring.loss_db_per_m").value_or(0.0);
  require(doc, ring.loss_db_per_m >= 0.0, "ring.loss_db_per_m", "must be non-negative");
  ring.in_coupling = doc.number("ring.in_coupling").value_or(1.0);
  ring.out_coupling = doc.number("ring.out_coupling").value_or(1.0);
  require(doc, ring.in_coupling >= 0.0 && ring.in_coupling <= 1.0, "ring.in_coupling", "must lie in [0, 1]");
  require(doc, ring.out_coupling >= 0.0 && ring.out_coupling <= 1.0, "ring.out_coupling", "must lie in [0, 1]");
  if (auto snap = doc.text("ring.snap")) {
    if (*snap == "signal")
      ring.radius_um = radius_for_resonance(cfg.bands.signal, signal_nm, ring.radius_um);
    else if (*snap == "idler")
      ring.radius_um = radius_for_resonance(cfg.bands.idler, idler_nm, ring.radius_um);
    else if (*snap != "none")
      doc.fail("ring.snap", "expected none, signal or idler");
  }

  // [pump]
  auto& pump = cfg.pump;
  pump.center_nm = cfg.bands.pump_nm;
  if (auto wl = doc.number("pump.wavelength_nm")) {
    require(doc, std::abs(*wl - cfg.bands.pump_nm) <= 1e-6 * cfg.bands.pump_nm, "pump.wavelength_nm",
            "violates energy conservation with bands.signal_nm and bands.idler_nm");
    pump.center_nm = *wl;
  }
  if (auto shape = doc.text("pump.shape")) {
    if (*shape == "cw") pump.shape = PumpShape::Cw;
    else if (*shape == "gaussian") pump.shape = PumpShape::Gaussian;
    else doc.fail("pump.shape", "expected cw or gaussian");
  }
  pump.fwhm_nm = doc.number("pump.fwhm_nm").value_or(0.0);
  if (pump.shape == PumpShape::Cw)
    require(doc, pump.fwhm_nm == 0.0, "pump.fwhm_nm", "must be 0 for a cw pump");
  else
    require(doc, pump.fwhm_nm > 0.0, "pump.fwhm_nm", "must be positive for a gaussian pump");
  pump.power_mw = doc.number("pump.power_mw").value_or(0.0);
  require(doc, pump.power_mw >= 0.0, "pump.power_mw", "must be non-negative");
  pump.phase = doc.number("pump.phase").value_or(0.0);

  // [numerics]
  auto& num = cfg.numerics;
  num.grid_points = doc.integer("numerics.grid_points").value_or(num.grid_points);
  require(doc, num.grid_points >= 2, "numerics.grid_points", "must be at least 2");
  num.span_factor = doc.number("numerics.span_factor").value_or(num.span_factor);
  require(doc, num.span_factor > 0.0, "numerics.span_factor", "must be positive");
  num.propagation_bins = doc.integer("numerics.propagation_bins").value_or(num.propagation_bins);
  require(doc, num.propagation_bins >= 1, "numerics.propagation_bins", "must be at least 1");
  num.slices = doc.integer("numerics.slices").value_or(num.slices);
  require(doc, num.slices >= 1, "numerics.slices", "must be at least 1");
  num.steps_per_period = doc.number("numerics.steps_per_period").value_or(num.steps_per_period);
  require(doc, num.steps_per_period >= 20.0, "numerics.steps_per_period", "must be at least 20");
  num.coupling = doc.number("numerics.coupling");
  if (num.coupling) require(doc, *num.coupling >= 0.0, "numerics.coupling", "must be non-negative");
  num.modulation.enabled = doc.boolean("numerics.phase_modulation").value_or(false);
  num.modulation.spm = doc.number("numerics.spm").value_or(0.0);
  num.modulation.xpm_signal = doc.number("numerics.xpm_signal").value_or(0.0);
  num.modulation.xpm_idler = doc.number("numerics.xpm_idler").value_or(0.0);
  num.points_per_fwhm = doc.number("numerics.points_per_fwhm").value_or(num.points_per_fwhm);
  require(doc, num.points_per_fwhm >= 4.0, "numerics.points_per_fwhm", "must be at least 4");
  num.max_points = doc.integer("numerics.max_points").value_or(num.max_points);
  require(doc, num.max_points >= 16, "numerics.max_points", "must be at least 16");

  // [scan]
  if (auto b = doc.text("scan.band")) cfg.scan.band = parse_band(doc, "scan.band", *b);
  cfg.scan.min_nm = doc.number("scan.min_nm");
  cfg.scan.max_nm = doc.number("scan.max_nm");
  if (cfg.scan.min_nm && cfg.scan.max_nm)
    require(doc, *cfg.scan.max_nm > *cfg.scan.min_nm, "scan.max_nm", "must exceed scan.min_nm");
  cfg.scan.points = doc.integer("scan.points").value_or(cfg.scan.points);
  require(doc, cfg.scan.points >= 2, "scan.points", "must be at least 2");

  // [poling]
  const double length = doc.number("poling.length_um").value_or(ring.circumference_um());
  require(doc, length > 0.0, "poling.length_um", "must be positive");
  const std::string kind = doc.text("poling.kind").value_or("uniform");
  const auto period = doc.number("poling.period_um");
  const auto chirp = doc.number("poling.chirp_rate");
  auto sign = doc.number("poling.sign");
  if (sign) require(doc, *sign == 1.0 || *sign == -1.0, "poling.sign", "must be +1 or -1");
  if (period) require(doc, *period > 0.0, "poling.period_um", "must be positive");
  std::optional<PolingSolution> solution;
  try {
    solution = poling_period_for(cfg.bands, signal_nm, idler_nm);
  } catch (const DegenerateError&) {
    // Phase-matched without a grating; only an explicit period defines poling.
  }
  const std::optional<double> base_period = period ? period : solution ? std::optional(solution->period_um) : std::nullopt;
  if (!sign) sign = solution && solution->grating_k < 0.0 ? -1.0 : 1.0;
  try {
    if (kind == "uniform") {
      if (chirp) doc.fail("poling.chirp_rate", "uniform poling takes no chirp rate");
      if (base_period) cfg.poling = PolingProfile::uniform(length, *base_period, *sign);
    } else if (kind == "linear_chirp") {
      if (!chirp) doc.missing("poling.chirp_rate");
      if (!base_period) doc.missing("poling.period_um");
      cfg.poling = PolingProfile::linear_chirp(length, *base_period, *chirp, *sign);
    } else if (kind == "window_chirp") {
      if (chirp) doc.fail("poling.chirp_rate", "window_chirp derives the chirp rate from the window");
      if (!base_period) doc.missing("poling.period_um");
      const auto base = PolingProfile::uniform(length, *base_period, *sign);
      cfg.poling = chirp_for_window(cfg.bands, base, ds.window_nm, ds.ripple_bound).profile;
    } else {
      doc.fail("poling.kind", "expected uniform, linear_chirp or window_chirp");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    doc.fail("poling.kind", e.what());
  }

  doc.reject_unused();
  cfg.hash = sha256_hex(hash_input);

  try {
    cfg.ring.validate();
    cfg.pump.validate();
    if (cfg.poling) cfg.device().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(origin.string() + ": " + e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

const PolingProfile& Config::require_poling() const {
  if (!poling)
    throw ConfigError(source.string() +
                      ": poling undefined: the bands are phase-matched without a grating; set poling.period_um");
  return *poling;
}

DeviceDesign Config::device(int threads) const {
  DeviceDesign d(bands);
  d.architecture = design.architecture;
  d.ring = ring;
  d.poling = require_poling();
  d.pump = pump;
  d.window_nm = design.window_nm;
  d.input_fwhm_nm = design.input_fwhm_nm;
  d.eta_tau = design.eta_tau;
  d.numerics.points_per_fwhm = numerics.points_per_fwhm;
  d.numerics.max_points = numerics.max_points;
  d.numerics.steps_per_period = numerics.steps_per_period;
  d.numerics.threads = threads;
  if (design.target_loaded_q) {
    const double r = reflectivity_for_loaded_q(d, *design.target_loaded_q);
    d.ring = d.ring.with_reflectivity(d.limiting_band(), r);
  }
  d.pump.cw_linewidth = cw_numerical_linewidth(d);
  return d;
}

double Config::coupling() const {
  if (numerics.coupling) return *numerics.coupling;
  return design.eta_tau / (kQpmFirstOrder * require_poling().length_um);
}

}  // namespace qfc
