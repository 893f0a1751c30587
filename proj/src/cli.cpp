#include "qfc/cli.hpp"

#include "qfc/config.hpp"
#include "qfc/errors.hpp"
#include "qfc/grid_file.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace qfc {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Context {
  const Config& cfg;
  std::filesystem::path out_dir;
  bool force = false;
  int threads = 1;
  bool verbose = false;
  std::ostream& log;
  std::vector<std::string> outputs;

  std::filesystem::path path(const std::string& name) const { return out_dir / name; }

  void write(const std::string& name, const std::string& contents) {
    write_file_atomic(path(name), contents);
    outputs.push_back(name);
    if (verbose) log << "wrote " << path(name).string() << "\n";
  }

  void write_grid_file(const std::string& name, const GridFile& grid) { write(name, format_grid(grid)); }

  std::string header(const std::string& command) const {
    return "# qfcring " + command + "\n# config_hash " + cfg.hash + "\n";
  }
};

std::pair<double, double> scan_range(const Config& cfg) {
  const auto& b = cfg.bands;
  const double half = 0.5 * cfg.design.window_nm;
  double lo = 0.0;
  double hi = 0.0;
  switch (cfg.scan.band) {
    case Band::Signal:
      lo = b.signal_nm - half;
      hi = b.signal_nm + half;
      break;
    case Band::Pump:
      lo = b.pump_nm - half;
      hi = b.pump_nm + half;
      break;
    case Band::Idler:
      lo = 1.0 / (1.0 / (b.signal_nm + half) + 1.0 / b.pump_nm);
      hi = 1.0 / (1.0 / (b.signal_nm - half) + 1.0 / b.pump_nm);
      break;
  }
  return {cfg.scan.min_nm.value_or(lo), cfg.scan.max_nm.value_or(hi)};
}

void cmd_dispersion(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& provider = cfg.bands.provider(cfg.scan.band);
  const auto [lo, hi] = scan_range(cfg);
  std::string s = ctx.header("dispersion");
  s += "# band " + std::string(to_string(cfg.scan.band)) + "\n# wavelength_nm\tn\tn_g\tbeta_rad_per_um\n";
  const ArrayXd wl = ArrayXd::LinSpaced(cfg.scan.points, lo, hi);
  for (Index k = 0; k < wl.size(); ++k)
    s += num(wl[k]) + "\t" + num(refractive_index(provider, wl[k])) + "\t" + num(group_index(provider, wl[k])) +
         "\t" + num(propagation_constant(provider, wl[k])) + "\n";
  ctx.write("dispersion.tsv", s);
}

struct PmfResult {
  MismatchGrid mismatch;
  PhaseMatchGrid pmf;
};

PmfResult compute_pmf(const Context& ctx, Index points) {
  const auto& cfg = ctx.cfg;
  const auto& profile = cfg.require_poling();
  const auto axes = default_grid_axes(cfg.bands, cfg.pump, profile.length_um, points, cfg.numerics.span_factor);
  auto mismatch = mismatch_grid(cfg.bands, axes.signal, axes.idler, profile.grating_k());
  auto pmf = profile.kind == PolingKind::Uniform
                 ? pmf_uniform_grid(mismatch, profile.length_um)
                 : pmf_chirped(profile, mismatch, {cfg.numerics.steps_per_period, ctx.threads});
  return {std::move(mismatch), std::move(pmf)};
}

void cmd_pmf(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& profile = cfg.require_poling();
  const auto r = compute_pmf(ctx, cfg.numerics.grid_points);
  ctx.write_grid_file("pmf.grid", complex_grid("pmf", cfg.hash, grid_axis("signal_omega", "rad/s", r.pmf.signal),
                                               grid_axis("idler_omega", "rad/s", r.pmf.idler), r.pmf.values));
  std::string s = ctx.header("pmf");
  s += "length_um = " + num(profile.length_um) + "\n";
  s += "poling = " + std::string(profile.kind == PolingKind::Uniform ? "uniform" : "linear_chirp") + "\n";
  s += "period_um = " + num(profile.base_period_um) + "\n";
  s += "chirp_rate = " + num(profile.chirp_rate) + "\n";
  s += "grating_k_rad_per_um = " + num(profile.grating_k()) + "\n";
  s += "theta_deg = " + num(pmf_angle(cfg.bands)) + "\n";
  s += "window_ripple = " + num(window_ripple(cfg.bands, profile, cfg.design.window_nm)) + "\n";
  ctx.write("pmf.txt", s);
}

void cmd_ptf(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto pump = cfg.pump;
  if (pump.shape == PumpShape::Cw) pump.cw_linewidth = cw_numerical_linewidth(cfg.device(ctx.threads));
  const auto r = compute_pmf(ctx, cfg.numerics.grid_points);
  const auto ptf = ptf_low_gain(r.pmf, pump);
  ctx.write_grid_file("ptf.grid", complex_grid("ptf", cfg.hash, grid_axis("signal_omega", "rad/s", ptf.signal),
                                               grid_axis("idler_omega", "rad/s", ptf.idler), ptf.values));
  const auto sm = schmidt_metrics(ptf);
  std::string s = ctx.header("ptf");
  s += "schmidt_number = " + num(sm.schmidt_number) + "\n";
  s += "# leading normalised singular values\n";
  for (Index k = 0; k < std::min<Index>(10, sm.singular_values.size()); ++k)
    s += "s" + std::to_string(k) + " = " + num(sm.singular_values[k]) + "\n";
  ctx.write("schmidt.txt", s);
}

void cmd_propagate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& profile = cfg.require_poling();
  auto pump = cfg.pump;
  if (pump.shape == PumpShape::Cw) pump.cw_linewidth = cw_numerical_linewidth(cfg.device(ctx.threads));
  const auto r = compute_pmf(ctx, cfg.numerics.propagation_bins);
  PropagationOptions opt;
  opt.slices = cfg.numerics.slices;
  opt.steps_per_period = cfg.numerics.steps_per_period;
  opt.modulation = cfg.numerics.modulation;
  opt.threads = ctx.threads;
  const double eta = cfg.coupling();
  const auto u = propagate_high_gain(profile, r.mismatch, pump, eta, opt);
  const auto sa = grid_axis("signal_omega", "rad/s", u.signal);
  const auto ia = grid_axis("idler_omega", "rad/s", u.idler);
  ctx.write_grid_file("transfer_ss.grid", complex_grid("propagate", cfg.hash, sa, sa, u.signal_to_signal()));
  ctx.write_grid_file("transfer_is.grid", complex_grid("propagate", cfg.hash, ia, sa, u.idler_from_signal()));
  ctx.write_grid_file("transfer_si.grid", complex_grid("propagate", cfg.hash, sa, ia, u.signal_from_idler()));
  ctx.write_grid_file("transfer_ii.grid", complex_grid("propagate", cfg.hash, ia, ia, u.idler_to_idler()));
  std::string s = ctx.header("propagate");
  s += "coupling_eta = " + num(eta) + "\n";
  s += "slices = " + std::to_string(u.slices) + "\n";
  s += "unitarity_error = " + num(u.unitarity_error()) + "\n";
  const MatrixXcd is = u.idler_from_signal();
  const Index centre = is.cols() / 2;
  s += "centre_bin_conversion = " + num(is.col(centre).squaredNorm()) + "\n";
  ctx.write("propagate.txt", s);
}

void cmd_ring(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Band band = cfg.scan.band == Band::Idler ? Band::Idler : Band::Signal;
  const auto [lo, hi] = scan_range(cfg);
  const auto resp = ring_response(cfg.ring, cfg.bands.provider(band), band, lo, hi, cfg.scan.points);
  std::string s = ctx.header("ring");
  s += "# band " + std::string(to_string(band)) + "\n# wavelength_nm\tbuildup_power\tbuildup_phase\ttransmission\n";
  for (Index k = 0; k < resp.wavelength_nm.size(); ++k)
    s += num(resp.wavelength_nm[k]) + "\t" + num(std::norm(resp.buildup[k])) + "\t" + num(std::arg(resp.buildup[k])) +
         "\t" + num(resp.transmission[k]) + "\n";
  s += "\n# resonances\n# center_nm\tfwhm_pm\tloaded_q\tfinesse\n";
  for (const auto& r : resp.resonances)
    s += num(r.center_nm) + "\t" + num(r.fwhm_pm) + "\t" + num(r.loaded_q) + "\t" + num(r.finesse) + "\n";
  ctx.write("ring.tsv", s);
}

void cmd_comb(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Band band = cfg.scan.band == Band::Idler ? Band::Idler : Band::Signal;
  const auto& provider = cfg.bands.provider(band);
  const auto [lo, hi] = scan_range(cfg);
  std::string s = ctx.header("comb");
  s += "# band " + std::string(to_string(band)) + "\n# center_nm\tmode_number\tfsr_nm\tfwhm_pm\tloaded_q\n";
  for (double c : resonance_comb(cfg.ring, provider, lo, hi)) {
    const double m = mode_number(provider, cfg.ring.circumference_um(), c);
    s += num(c) + "\t" + std::to_string(std::llround(m)) + "\t" + num(fsr(cfg.ring, provider, c));
    if (cfg.ring.reflectivity(band) > 0.0) {
      const auto lw = linewidth_q(cfg.ring, provider, c, band);
      s += "\t" + num(lw.fwhm_pm) + "\t" + num(lw.loaded_q);
    } else {
      s += "\tnan\tnan";
    }
    s += "\n";
  }
  ctx.write("comb.tsv", s);
}

void cmd_search(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto found = search_double_resonance(cfg.bands, cfg.ring, cfg.design.search_min_um, cfg.design.search_max_um,
                                             cfg.design.search_tolerance);
  std::string s = ctx.header("search");
  s += "# radius_um\tsignal_mode\tidler_mode\tsignal_residual\tidler_residual\tresidual\n";
  for (const auto& c : found)
    s += num(c.radius_um) + "\t" + std::to_string(c.signal_mode) + "\t" + std::to_string(c.idler_mode) + "\t" +
         num(c.signal_residual) + "\t" + num(c.idler_residual) + "\t" + num(c.residual) + "\n";
  ctx.write("search.tsv", s);
}

std::string optional_num(const std::optional<double>& v) { return v ? num(*v) : "none"; }

std::string format_report(const Context& ctx, const DeviceDesign& d, const DesignReport& r) {
  std::string s = "# qfcring analyze report\nconfig_hash = " + ctx.cfg.hash + "\n";
  s += "architecture = " + std::string(to_string(r.architecture)) + "\n";
  s += "radius_um = " + num(d.ring.radius_um) + "\n";
  s += "R_signal = " + num(d.ring.reflectivity_signal) + "\n";
  s += "R_idler = " + num(d.ring.reflectivity_idler) + "\n";
  s += "loss_db_per_m = " + num(d.ring.loss_db_per_m) + "\n";
  s += "window_nm = " + num(d.window_nm) + "\n";
  s += "input_fwhm_nm = " + num(r.input_fwhm_nm) + "\n";
  s += "\n[spectrum]\n";
  s += "peak_nm = " + num(r.peak_nm) + "\n";
  s += "fwhm_pm = " + num(r.fwhm_pm) + "\n";
  s += "fwhm_hz = " + num(r.fwhm_hz) + "\n";
  s += "loaded_q = " + num(r.loaded_q) + "\n";
  s += "cavity_fwhm_pm = " + optional_num(r.cavity_fwhm_pm) + "\n";
  s += "cavity_q = " + optional_num(r.cavity_q) + "\n";
  s += "peaks = " + std::to_string(r.peak_count) + "\n";
  s += "dominant_peaks = " + std::to_string(r.dominant_peaks) + "\n";
  s += "side_suppression_db = " + optional_num(r.side_suppression_db) + "\n";
  s += "predicted_peak_nm = " + optional_num(r.predicted_peak_nm) + "\n";
  s += "compression_factor = " + num(r.compression_factor) + "\n";
  s += "frequency_compression = " + num(r.frequency_compression) + "\n";
  s += "pmf_ripple = " + num(r.pmf_ripple) + "\n";
  s += "\n[retention]\n";
  s += "in_coupling = " + num(r.retention.in_coupling) + "\n";
  s += "conversion = " + num(r.retention.conversion) + "\n";
  s += "escape = " + num(r.retention.escape) + "\n";
  s += "out_coupling = " + num(r.retention.out_coupling) + "\n";
  s += "total = " + num(r.retention.total) + "\n";
  s += "\n[validity]\n";
  if (r.validity.single_signal_resonance)
    s += std::string("single_signal_resonance = ") + (*r.validity.single_signal_resonance ? "true" : "false") + "\n";
  if (r.validity.coincidence_found)
    s += std::string("coincidence_found = ") + (*r.validity.coincidence_found ? "true" : "false") + "\n";
  s += "\n[signal_resonances_in_window]\n";
  for (double c : r.signal_comb_nm) s += num(c) + "\n";
  if (!r.pairs.empty()) {
    s += "\n[resonance_pairs]\n# signal_nm\tidler_nm\tdetuning_hz\ttolerance_hz\n";
    for (const auto& p : r.pairs)
      s += num(p.signal_nm) + "\t" + num(p.idler_nm) + "\t" + num(p.detuning_hz) + "\t" + num(p.tolerance_hz) + "\n";
  }
  if (!r.sweep.empty()) {
    s += "\n[sweep]\n# R\tfwhm_pm\tloaded_q\tcompression\tescape\tretention\n";
    for (const auto& row : r.sweep)
      s += num(row.reflectivity) + "\t" + num(row.fwhm_pm) + "\t" + num(row.loaded_q) + "\t" +
           num(row.compression_factor) + "\t" + num(row.escape) + "\t" + num(row.retention) + "\n";
  }
  if (!r.diagnostics.empty()) {
    s += "\n[diagnostics]\n";
    for (const auto& line : r.diagnostics) s += line + "\n";
  }
  return s;
}

std::string format_spectrum(const Context& ctx, const DesignReport& r) {
  std::string s = ctx.header("analyze");
  s += "# idler_nm\tsignal_nm\tS_normalised\tS_dB\tsignal_buildup\tidler_buildup\tpmf\tinput\n";
  const auto& sp = r.spectrum;
  for (Index k = 0; k < sp.value.size(); ++k)
    s += num(sp.idler_nm[k]) + "\t" + num(sp.signal_nm[k]) + "\t" + num(sp.value[k]) + "\t" +
         num(10.0 * std::log10(std::max(sp.value[k], 1e-300))) + "\t" + num(sp.signal_buildup[k]) + "\t" +
         num(sp.idler_buildup[k]) + "\t" + num(sp.pmf[k]) + "\t" + num(sp.input[k]) + "\n";
  return s;
}

void guard_report(const Context& ctx, const std::string& name) {
  const auto path = ctx.path(name);
  if (ctx.force || !std::filesystem::exists(path)) return;
  std::istringstream in(read_file(path));
  std::string line;
  const std::string key = "config_hash = ";
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) {
      if (line.substr(key.size()) == ctx.cfg.hash) return;
      throw IoError("refusing to overwrite " + path.string() + ": it was generated from config hash " +
                    line.substr(key.size()) + " (use --force)");
    }
  }
  throw IoError("refusing to overwrite " + path.string() + ": it carries no config hash (use --force)");
}

void cmd_analyze(Context& ctx) {
  guard_report(ctx, "report.txt");
  const auto d = ctx.cfg.device(ctx.threads);
  const auto r = analyze(d);
  ctx.write("spectrum.tsv", format_spectrum(ctx, r));
  ctx.write("report.txt", format_report(ctx, d, r));
}

void cmd_sweep(Context& ctx) {
  const auto d = ctx.cfg.device(ctx.threads);
  const auto r = compression_report(d, ctx.cfg.design.reflectivity_sweep);
  std::string s = ctx.header("sweep");
  s += "# band " + std::string(to_string(d.limiting_band())) + "\n";
  s += "# R\tfwhm_pm\tloaded_q\tcompression\tescape\tretention\n";
  for (const auto& row : r.sweep)
    s += num(row.reflectivity) + "\t" + num(row.fwhm_pm) + "\t" + num(row.loaded_q) + "\t" +
         num(row.compression_factor) + "\t" + num(row.escape) + "\t" + num(row.retention) + "\n";
  ctx.write("sweep.tsv", s);
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case Error::Category::Config:
      return kExitConfig;
    case Error::Category::Io:
      return kExitIo;
    case Error::Category::Computation:
      break;
  }
  return kExitComputation;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ring-resonator quantum frequency conversion design toolkit", "qfcring"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = ".";
  bool force = false;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "Configuration file")->required();
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--force", force, "Overwrite reports generated from a different config");
  app.add_option("--threads", threads, "Worker threads (default: QFC_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "Progress messages on stderr");

  const std::map<std::string, std::pair<std::string, std::function<void(Context&)>>> commands{
      {"dispersion", {"n, n_g and beta over the scan band", cmd_dispersion}},
      {"pmf", {"phase-matching function grid", cmd_pmf}},
      {"ptf", {"low-gain process transfer function and Schmidt metrics", cmd_ptf}},
      {"propagate", {"high-gain transfer matrix blocks", cmd_propagate}},
      {"ring", {"ring response over the scan band", cmd_ring}},
      {"comb", {"resonance list over the scan band", cmd_comb}},
      {"search", {"double-resonance radius search", cmd_search}},
      {"analyze", {"single- or double-resonant design report", cmd_analyze}},
      {"sweep", {"output-coupler reflectivity trade-off table", cmd_sweep}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qfcring: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (threads == 0) {
    threads = 1;
    if (const char* env = std::getenv("QFC_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*env == '\0' || *end != '\0' || v < 1) {
        err << "qfcring: QFC_THREADS must be a positive integer\n";
        return kExitUsage;
      }
      threads = static_cast<int>(v);
    }
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto started = std::chrono::steady_clock::now();
  try {
    const Config cfg = load_config(config_path);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    Context ctx{cfg, out_dir, force, threads, verbose, err, {}};
    commands.at(command).second(ctx);

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::string manifest = "# qfcring run manifest\ncommand = " + command + "\nversion = " + kVersion +
                           "\nconfig = " + config_path + "\nconfig_hash = " + cfg.hash +
                           "\nthreads = " + std::to_string(threads) + "\nelapsed_s = " + num(seconds) + "\n";
    for (const auto& o : ctx.outputs) manifest += "output = " + o + "\n";
    write_file_atomic(ctx.path("manifest_" + command + ".txt"), manifest);
    out << command << ": wrote";
    for (const auto& o : ctx.outputs) out << " " << o;
    out << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "qfcring " << command << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "qfcring " << command << ": " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace qfc
