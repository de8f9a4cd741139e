#include "rshock/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace rshock {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_header(std::ostream& os, const PeriodicGrid& grid) {
  os << "# torus-field v1, dim=" << grid.dim() << ", N=" << grid.n() << '\n';
}

template <typename ValueWriter>
void write_rows(std::ostream& os, const PeriodicGrid& grid, ValueWriter&& value) {
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) os << i << ',' << format_real(grid.coord(i)) << ',' << value(std::size_t(i)) << '\n';
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        os << i << ',' << j << ',' << format_real(grid.coord(i)) << ',' << format_real(grid.coord(j)) << ','
           << value(grid.index(i, j)) << '\n';
  }
}

PeriodicGrid parse_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("torus-field: missing header");
  int dim = 0;
  int n = 0;
  if (std::sscanf(line.c_str(), "# torus-field v1, dim=%d, N=%d", &dim, &n) != 2)
    throw InvalidArgument("torus-field: malformed header '" + line + "'");
  return PeriodicGrid(dim, n);
}

std::vector<double> parse_rows(std::istream& is, const PeriodicGrid& grid) {
  std::vector<double> values(grid.size());
  std::vector<bool> seen(grid.size(), false);
  const int cols = grid.dim() == 1 ? 3 : 5;
  std::string line;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (int(parts.size()) != cols) throw InvalidArgument("torus-field: wrong column count in '" + line + "'");
    const int i = std::stoi(parts[0]);
    const int j = grid.dim() == 1 ? 0 : std::stoi(parts[1]);
    if (i < 0 || i >= grid.n() || j < 0 || j >= grid.n()) throw InvalidArgument("torus-field: index out of range");
    const std::size_t k = grid.dim() == 1 ? grid.index(i) : grid.index(i, j);
    const std::string& v = parts.back();
    double value = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), value);
    if (res.ec != std::errc()) throw InvalidArgument("torus-field: bad value '" + v + "'");
    values[k] = value;
    seen[k] = true;
    ++rows;
  }
  if (rows != grid.size()) throw InvalidArgument("torus-field: expected " + std::to_string(grid.size()) + " rows");
  for (bool s : seen)
    if (!s) throw InvalidArgument("torus-field: duplicate or missing node");
  return values;
}

}  // namespace

void write_field_csv(std::ostream& os, const ScalarField& field) {
  write_header(os, field.grid());
  write_rows(os, field.grid(), [&](std::size_t k) { return format_real(field[k]); });
}

ScalarField read_field_csv(std::istream& is) {
  const PeriodicGrid grid = parse_header(is);
  return ScalarField(grid, parse_rows(is, grid));
}

void write_mask_csv(std::ostream& os, const PeriodicGrid& grid, const std::vector<bool>& mask) {
  if (mask.size() != grid.size()) throw InvalidArgument("mask size mismatch");
  write_header(os, grid);
  write_rows(os, grid, [&](std::size_t k) { return mask[k] ? 1 : 0; });
}

std::vector<bool> read_mask_csv(std::istream& is, PeriodicGrid* grid_out) {
  const PeriodicGrid grid = parse_header(is);
  const std::vector<double> v = parse_rows(is, grid);
  std::vector<bool> mask(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) mask[k] = v[k] != 0.0;
  if (grid_out) *grid_out = grid;
  return mask;
}

}  // namespace rshock
