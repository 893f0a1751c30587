#include "qfc/cli.hpp"
#include "qfc/config.hpp"
#include "qfc/errors.hpp"
#include "qfc/grid_file.hpp"

#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace qfc;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"(schema = qfc-config/1

[bands]
signal_nm = 1550
idler_nm = 780

[dispersion.pump]
kind = constant
n = 2.0

[dispersion.signal]
kind = constant
n = 2.0

[dispersion.idler]
kind = constant
n = 2.1

[ring]
radius_um = 50
R_signal = 0.9
R_idler = 0
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qfc_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

const fs::path kConfigDir = QFC_CONFIG_DIR;

}  // namespace

TEST_CASE("minimal config loads with defaults") {
  const auto cfg = parse_config(kMinimal, "minimal.cfg");
  CHECK(cfg.schema == "qfc-config/1");
  CHECK(cfg.bands.pump_nm == doctest::Approx(1570.13).epsilon(1e-6));
  CHECK(cfg.ring.reflectivity_signal == 0.9);
  CHECK(cfg.ring.reflectivity_idler == 0.0);
  CHECK(cfg.ring.loss_db_per_m == 0.0);
  CHECK(cfg.design.architecture == Architecture::SingleResonant);
  CHECK(cfg.design.window_nm == 5.0);
  CHECK(cfg.numerics.grid_points == 512);
  CHECK(cfg.numerics.slices == 256);
  REQUIRE(cfg.poling.has_value());
  CHECK(cfg.poling->kind == PolingKind::Uniform);
  CHECK(cfg.poling->length_um == doctest::Approx(cfg.ring.circumference_um()));
  CHECK(cfg.hash.size() == 64);
  CHECK(cfg.hash == sha256_hex(kMinimal));
  CHECK(cfg.coupling() == doctest::Approx(cfg.design.eta_tau / (kQpmFirstOrder * cfg.poling->length_um)));
}

TEST_CASE("sha256 digest") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("validation errors name the key and the bound") {
  const auto msg = config_error(replace(kMinimal, "R_signal = 0.9", "R_signal = 1.2"));
  CHECK(msg.find("ring.R_signal") != std::string::npos);
  CHECK(msg.find("(0, 1)") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "radius_um = 50", "radius_um = -3")).find("ring.radius_um") !=
        std::string::npos);
}

TEST_CASE("unknown keys and sections are rejected with their location") {
  auto msg = config_error(replace(kMinimal, "radius_um = 50", "radius_um = 50\nradiusss = 3"));
  CHECK(msg.find("radiusss") != std::string::npos);
  CHECK(msg.find("test.cfg:") != std::string::npos);
  msg = config_error(kMinimal + "\n[cavity]\nx = 1\n");
  CHECK(msg.find("cavity") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
  const auto msg = config_error(replace(kMinimal, "signal_nm = 1550", "signal_nm 1550"));
  CHECK(msg.find("test.cfg:4:") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "n = 2.1", "n = 2.1x")).find("expected a finite number") != std::string::npos);
}

TEST_CASE("schema is required") {
  CHECK(config_error(replace(kMinimal, "schema = qfc-config/1\n", "")).find("schema") != std::string::npos);
  CHECK(config_error(replace(kMinimal, "qfc-config/1", "qfc-config/9")).find("unsupported schema") !=
        std::string::npos);
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"single_resonant.cfg", "double_resonant.cfg"}) {
    const auto cfg = load_config(kConfigDir / name);
    CHECK_NOTHROW(cfg.device().validate());
  }
  CHECK_THROWS_AS(load_config(kConfigDir / "missing.cfg"), ConfigError);
}

TEST_CASE("grid round trip") {
  MatrixXcd m(2, 2);
  m << Complex(1.0, -0.5), Complex(0.1, 1e-300), Complex(-3.25e12, 7.0), Complex(0.0, -0.0);
  const auto g = complex_grid("pmf", "abc", grid_axis("omega_s", "rad/s", UniformAxis{1.0, 0.5, 2}),
                              grid_axis("omega_i", "rad/s", UniformAxis{2.0, 0.25, 2}), m);
  const auto back = parse_grid(format_grid(g));
  CHECK(back.command == "pmf");
  CHECK(back.config_hash == "abc");
  CHECK(back.axes == g.axes);
  CHECK(complex_matrix(back) == m);
  CHECK(format_grid(back) == format_grid(g));
}

TEST_CASE("512 x 512 grid is bit-exact through a file") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1e3);
  MatrixXcd m(512, 512);
  for (Index c = 0; c < 512; ++c)
    for (Index r = 0; r < 512; ++r) m(r, c) = Complex(n(rng), n(rng) * 1e-9);
  const auto dir = scratch("grid");
  const auto g = complex_grid("ptf", "deadbeef", grid_axis("omega_s", "rad/s", UniformAxis{1.2e15, 3.3e9, 512}),
                              grid_axis("omega_i", "rad/s", UniformAxis{2.4e15, 3.3e9, 512}), m);
  write_grid(g, dir / "ptf.grid");
  const auto back = complex_matrix(read_grid(dir / "ptf.grid"));
  CHECK(std::memcmp(back.data(), m.data(), sizeof(Complex) * m.size()) == 0);
  fs::remove_all(dir);
}

TEST_CASE("truncated grid reports the value count") {
  MatrixXcd m = MatrixXcd::Constant(3, 3, Complex(1.0, 2.0));
  const auto g = complex_grid("pmf", "h", grid_axis("a", "u", UniformAxis{0.0, 1.0, 3}),
                              grid_axis("b", "u", UniformAxis{0.0, 1.0, 3}), m);
  std::string text = format_grid(g);
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  try {
    parse_grid(text, "cut.grid");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("expected 9 values, found 8") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_grid("not a grid\n"), FormatError);
}

TEST_CASE("exact formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -4.9e-324, 2.2250738585072014e-308}) {
    CHECK(std::strtod(exact(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("repeated runs are byte-identical") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto cfg = (kConfigDir / "single_resonant.cfg").string();
  REQUIRE(run({"analyze", "--config", cfg, "--out", a.string()}) == kExitOk);
  REQUIRE(run({"analyze", "--config", cfg, "--out", b.string(), "--threads", "3"}) == kExitOk);
  for (const char* f : {"report.txt", "spectrum.tsv"}) CHECK(read_file(a / f) == read_file(b / f));
  CHECK(fs::exists(a / "manifest_analyze.txt"));
  CHECK(read_file(a / "manifest_analyze.txt").find("elapsed_s") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  std::string err;
  CHECK(run({"frobnicate", "--config", "x.cfg"}, &err) == kExitUsage);
  CHECK(run({"analyze"}, &err) == kExitUsage);

  // Empty search range is a computation error that names the range.
  auto text = read_file(kConfigDir / "double_resonant.cfg");
  const auto min_at = text.find("search_min_um");
  REQUIRE(min_at != std::string::npos);
  text = replace(text, text.substr(min_at, text.find('\n', min_at) - min_at), "search_min_um = 900");
  write_file_atomic(dir / "empty.cfg", text);
  CHECK(run({"search", "--config", (dir / "empty.cfg").string(), "--out", dir.string()}, &err) == kExitComputation);
  CHECK(err.find("empty radius range") != std::string::npos);

  write_file_atomic(dir / "bad.cfg", replace(kMinimal, "R_signal = 0.9", "R_signal = 1.2"));
  CHECK(run({"analyze", "--config", (dir / "bad.cfg").string(), "--out", dir.string()}, &err) == kExitConfig);
  fs::remove_all(dir);
}

TEST_CASE("analyze refuses to overwrite a report from another config") {
  const auto dir = scratch("guard");
  const auto single = (kConfigDir / "single_resonant.cfg").string();
  REQUIRE(run({"analyze", "--config", single, "--out", dir.string()}) == kExitOk);
  // same config: overwriting is fine
  CHECK(run({"analyze", "--config", single, "--out", dir.string()}) == kExitOk);

  auto text = read_file(single);
  write_file_atomic(dir / "other.cfg", replace(text, "R_signal = 0.99", "R_signal = 0.95"));
  std::string err;
  CHECK(run({"analyze", "--config", (dir / "other.cfg").string(), "--out", dir.string()}, &err) == kExitIo);
  CHECK(err.find("--force") != std::string::npos);
  CHECK(run({"analyze", "--config", (dir / "other.cfg").string(), "--out", dir.string(), "--force"}) == kExitOk);
  fs::remove_all(dir);
}

TEST_CASE("thread count from the environment") {
  const auto dir = scratch("env");
  const auto cfg = (kConfigDir / "single_resonant.cfg").string();
  ::setenv("QFC_THREADS", "2", 1);
  CHECK(run({"comb", "--config", cfg, "--out", dir.string()}) == kExitOk);
  CHECK(read_file(dir / "manifest_comb.txt").find("threads = 2") != std::string::npos);
  ::setenv("QFC_THREADS", "zero", 1);
  CHECK(run({"comb", "--config", cfg, "--out", dir.string()}) == kExitUsage);
  ::unsetenv("QFC_THREADS");
  fs::remove_all(dir);
}
