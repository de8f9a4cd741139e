#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

/// Decimal text with 17 significant digits; round-trips every finite double.
std::string format_real(double v);

/// Writes `# torus-field v1, dim=<n>, N=<N>` followed by one row per node,
/// `i[,j],x[,y],value`, in row-major order.
void write_field_csv(std::ostream& os, const ScalarField& field);
ScalarField read_field_csv(std::istream& is);

/// Boolean mask in the same layout; values are written as 0/1.
void write_mask_csv(std::ostream& os, const PeriodicGrid& grid, const std::vector<bool>& mask);
std::vector<bool> read_mask_csv(std::istream& is, PeriodicGrid* grid_out = nullptr);

}  // namespace rshock
