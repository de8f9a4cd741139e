#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

/// Point of the fundamental domain [0,1)^n; the second coordinate is unused in 1D.
using Site = std::array<double, 2>;

struct ShockSet {
  PeriodicGrid grid;
  std::vector<bool> mask;
  /// Max over axes of forward minus backward difference of the gradient.
  ScalarField gradient_gap;
  double tau = 0.0;

  std::size_t count() const;
};

/// Default threshold 10 h.
double default_shock_threshold(const PeriodicGrid& grid);

/// Marks nodes whose one-sided gradient jump exceeds tau (tau <= 0 selects 10 h).
ShockSet extract_shocks(const QuasiPeriodicConvex& psi, double tau = 0.0);

/// Same scan on a periodic field: gap = max over axes of (D+ f - D- f).
ShockSet extract_shocks(const ScalarField& periodic, double tau = 0.0);

/// Nodes within `radius` grid steps (Chebyshev distance, periodic) of a set node.
std::vector<bool> dilate(const PeriodicGrid& grid, const std::vector<bool>& mask, int radius);

struct ZeldovichMap {
  /// grad phi at every node by centered differences (points of R^n, not wrapped).
  std::vector<std::array<double, 2>> displacement;
  /// Dual nodes covered by the images of two or more primal elements.
  std::size_t multi_hit = 0;
};

/// x -> grad phi_t(x). The map is extended piecewise linearly (1D segments,
/// 2D triangles of the split squares); a dual node counts as multi-hit when
/// more than one element image contains it modulo the lattice.
ZeldovichMap zeldovich_map(const QuasiPeriodicConvex& phi);

/// psi_inf(y) = max over sites x and lattice translates k in {-1,0,1}^n of
/// (x + k).y - psi0*(x + k), with psi0*(x + k) = psi0*(x) + k.x + |k|^2/2.
/// Throws EmptySiteSet for an empty list and InvalidArgument for repeated sites
/// or sites outside [0,1)^n.
QuasiPeriodicConvex tropical_limit(const QuasiPeriodicConvex& psi0, const std::vector<Site>& sites);

struct Tessellation {
  PeriodicGrid grid;
  std::vector<Site> sites;
  /// Nearest site under the torus metric (lowest index on ties).
  std::vector<int> voronoi_cell_id;
  /// Nodes adjacent to a node whose nearest lattice point of the site set
  /// (site plus translate) differs; includes the lattice-translate boundaries
  /// of a single cell.
  std::vector<bool> boundary;
  /// Unordered site pairs (a < b) whose cells share a node pair.
  std::vector<std::pair<int, int>> delaunay_edges;
};

Tessellation voronoi_delaunay(const PeriodicGrid& grid, const std::vector<Site>& sites);

struct ShockVoronoiAgreement {
  /// Shock nodes farther than one cell from the boundary plus boundary nodes
  /// farther than one cell from a shock node.
  std::size_t mismatch = 0;
  /// Plain symmetric difference of the 1-cell dilated shock mask and the boundary.
  std::size_t symmetric_difference = 0;
  std::size_t shock_nodes = 0;
  std::size_t boundary_nodes = 0;
};

ShockVoronoiAgreement shock_voronoi_agreement(const ShockSet& shocks, const Tessellation& tess);

/// CSV `node_i,node_j,cell_id,is_shock`; node_j is 0 in 1D.
void write_tessellation_csv(const std::string& path, const Tessellation& tess, const ShockSet& shocks);
/// CSV `site,x,y`.
void write_sites_csv(const std::string& path, const std::vector<Site>& sites);

}  // namespace rshock
