#pragma once

#include "qfc/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qfc {

struct GridAxis {
  std::string name;
  std::string unit;
  double start = 0.0;
  double step = 0.0;
  Index count = 0;

  bool operator==(const GridAxis&) const = default;
};

enum class ValueKind { Real, Complex };

/// Header plus row-major values; the last axis varies fastest.
struct GridFile {
  std::string command;
  std::string config_hash;
  ValueKind kind = ValueKind::Complex;
  std::vector<GridAxis> axes;
  ArrayXd real;
  ArrayXcd complex;

  Index expected_count() const;
  Index value_count() const { return kind == ValueKind::Real ? real.size() : complex.size(); }
};

GridAxis grid_axis(std::string name, std::string unit, const UniformAxis& axis);

/// Matrix rows map to the first axis, columns to the second.
GridFile complex_grid(std::string command, std::string config_hash, GridAxis rows, GridAxis cols,
                      const MatrixXcd& values);
MatrixXcd complex_matrix(const GridFile& grid);

/// Serialises with 17 significant digits so that reading back is bit-exact.
std::string format_grid(const GridFile& grid);
GridFile parse_grid(const std::string& text, const std::string& origin = "<memory>");

void write_grid(const GridFile& grid, const std::filesystem::path& path);
GridFile read_grid(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// printf-style %.16e, the shortest fixed layout that round-trips a double.
std::string exact(double v);

}  // namespace qfc
