#include "qfc/grid_file.hpp"

#include "qfc/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace qfc {

namespace {

constexpr const char* kMagic = "# qfc-grid 1";

double parse_double(const std::string& token, const std::string& origin, Index line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || *end != '\0' || errno == ERANGE) {
    std::ostringstream os;
    os << origin << ":" << line << ": malformed number '" << token << "'";
    throw FormatError(os.str());
  }
  return v;
}

}  // namespace

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

Index GridFile::expected_count() const {
  Index n = 1;
  for (const auto& a : axes) n *= a.count;
  return n;
}

GridAxis grid_axis(std::string name, std::string unit, const UniformAxis& axis) {
  return {std::move(name), std::move(unit), axis.start, axis.step, axis.count};
}

GridFile complex_grid(std::string command, std::string config_hash, GridAxis rows, GridAxis cols,
                      const MatrixXcd& values) {
  if (rows.count != values.rows() || cols.count != values.cols())
    throw InvalidArgument("complex_grid: axis counts do not match the matrix shape");
  GridFile g;
  g.command = std::move(command);
  g.config_hash = std::move(config_hash);
  g.kind = ValueKind::Complex;
  g.axes = {std::move(rows), std::move(cols)};
  g.complex.resize(values.size());
  Index k = 0;
  for (Index r = 0; r < values.rows(); ++r)
    for (Index c = 0; c < values.cols(); ++c) g.complex[k++] = values(r, c);
  return g;
}

MatrixXcd complex_matrix(const GridFile& grid) {
  if (grid.kind != ValueKind::Complex || grid.axes.size() != 2)
    throw FormatError("grid is not a two-axis complex grid");
  MatrixXcd m(grid.axes[0].count, grid.axes[1].count);
  Index k = 0;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = grid.complex[k++];
  return m;
}

std::string format_grid(const GridFile& grid) {
  if (grid.value_count() != grid.expected_count()) {
    std::ostringstream os;
    os << "grid holds " << grid.value_count() << " values, axes need " << grid.expected_count();
    throw InvalidArgument(os.str());
  }
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.value_count()) * 50 + 512);
  out += kMagic;
  out += "\n# command " + grid.command + "\n# config_hash " + grid.config_hash + "\n# value_kind ";
  out += grid.kind == ValueKind::Real ? "real\n" : "complex\n";
  for (const auto& a : grid.axes)
    out += "# axis " + a.name + " " + a.unit + " " + exact(a.start) + " " + exact(a.step) + " " +
           std::to_string(a.count) + "\n";
  out += "# values " + std::to_string(grid.value_count()) + "\n";
  if (grid.kind == ValueKind::Real) {
    for (Index k = 0; k < grid.real.size(); ++k) out += exact(grid.real[k]) + "\n";
  } else {
    for (Index k = 0; k < grid.complex.size(); ++k)
      out += exact(grid.complex[k].real()) + " " + exact(grid.complex[k].imag()) + "\n";
  }
  return out;
}

GridFile parse_grid(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  Index line_no = 0;
  auto header_error = [&](const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line_no << ": " << msg;
    throw FormatError(os.str());
  };

  if (!std::getline(in, line) || line != kMagic) {
    line_no = 1;
    header_error("not a qfc grid file (missing magic line)");
  }
  ++line_no;
  GridFile g;
  Index declared = -1;
  bool have_kind = false;
  while (declared < 0) {
    if (!std::getline(in, line)) header_error("header ends before the values line");
    ++line_no;
    std::istringstream h(line);
    std::string hash_mark, field;
    h >> hash_mark >> field;
    if (hash_mark != "#") header_error("expected a header line");
    if (field == "command") {
      std::getline(h >> std::ws, g.command);
    } else if (field == "config_hash") {
      std::getline(h >> std::ws, g.config_hash);
    } else if (field == "value_kind") {
      std::string kind;
      h >> kind;
      if (kind == "real") g.kind = ValueKind::Real;
      else if (kind == "complex") g.kind = ValueKind::Complex;
      else header_error("unknown value kind '" + kind + "'");
      have_kind = true;
    } else if (field == "axis") {
      GridAxis a;
      std::string start, step;
      if (!(h >> a.name >> a.unit >> start >> step >> a.count) || a.count < 1) header_error("malformed axis line");
      a.start = parse_double(start, origin, line_no);
      a.step = parse_double(step, origin, line_no);
      g.axes.push_back(a);
    } else if (field == "values") {
      if (!(h >> declared) || declared < 0) header_error("malformed values line");
    } else {
      header_error("unknown header field '" + field + "'");
    }
  }
  if (!have_kind) header_error("header lacks value_kind");
  if (g.axes.empty()) header_error("header declares no axes");
  if (declared != g.expected_count()) {
    std::ostringstream os;
    os << "header declares " << declared << " values but the axes need " << g.expected_count();
    header_error(os.str());
  }

  const Index expected = declared;
  if (g.kind == ValueKind::Real) g.real.resize(expected);
  else g.complex.resize(expected);
  Index found = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (found >= expected) {
      std::ostringstream os;
      os << origin << ": expected " << expected << " values, found more";
      throw FormatError(os.str());
    }
    std::istringstream row(line);
    std::string re, im, extra;
    row >> re;
    if (g.kind == ValueKind::Complex) {
      if (!(row >> im) || (row >> extra)) {
        std::ostringstream os;
        os << origin << ":" << line_no << ": expected 're im' pair";
        throw FormatError(os.str());
      }
      g.complex[found] = {parse_double(re, origin, line_no), parse_double(im, origin, line_no)};
    } else {
      if (row >> extra) {
        std::ostringstream os;
        os << origin << ":" << line_no << ": expected one value";
        throw FormatError(os.str());
      }
      g.real[found] = parse_double(re, origin, line_no);
    }
    ++found;
  }
  if (found != expected) {
    std::ostringstream os;
    os << origin << ": truncated grid, expected " << expected << " values, found " << found;
    throw FormatError(os.str());
  }
  return g;
}

void write_grid(const GridFile& grid, const std::filesystem::path& path) {
  write_file_atomic(path, format_grid(grid));
}

GridFile read_grid(const std::filesystem::path& path) { return parse_grid(read_file(path), path.string()); }

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace qfc
