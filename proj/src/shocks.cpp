#include "rshock/shocks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "rshock/field_io.hpp"
#include "rshock/legendre.hpp"
#include "rshock/parallel.hpp"

namespace rshock {

std::size_t ShockSet::count() const { return std::size_t(std::count(mask.begin(), mask.end(), true)); }

double default_shock_threshold(const PeriodicGrid& grid) { return 10.0 * grid.spacing(); }

namespace {

template <class Value>
ShockSet scan_gaps(const PeriodicGrid& g, double tau, Value value) {
  if (tau <= 0.0) tau = default_shock_threshold(g);
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  ScalarField gap(g);
  std::vector<bool> mask(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto [i, j] = g.coords(k);
    double v;
    if (g.dim() == 1) {
      v = (value(i + 1, 0) - 2.0 * value(i, 0) + value(i - 1, 0)) * inv_h;
    } else {
      const double c = value(i, j);
      const double gx = (value(i + 1, j) - 2.0 * c + value(i - 1, j)) * inv_h;
      const double gy = (value(i, j + 1) - 2.0 * c + value(i, j - 1)) * inv_h;
      v = std::max(gx, gy);
    }
    gap[k] = v;
    mask[k] = v > tau;
  }
  (void)n;
  return {g, std::move(mask), std::move(gap), tau};
}

}  // namespace

ShockSet extract_shocks(const QuasiPeriodicConvex& psi, double tau) {
  if (psi.grid().dim() == 1) return scan_gaps(psi.grid(), tau, [&](int i, int) { return psi.total(i); });
  return scan_gaps(psi.grid(), tau, [&](int i, int j) { return psi.total(i, j); });
}

ShockSet extract_shocks(const ScalarField& f, double tau) {
  if (f.grid().dim() == 1) return scan_gaps(f.grid(), tau, [&](int i, int) { return f.at(i); });
  return scan_gaps(f.grid(), tau, [&](int i, int j) { return f.at(i, j); });
}

std::vector<bool> dilate(const PeriodicGrid& g, const std::vector<bool>& mask, int radius) {
  std::vector<bool> out(mask.size(), false);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const auto [i, j] = g.coords(k);
    if (g.dim() == 1) {
      for (int d = -radius; d <= radius; ++d) out[g.index(i + d)] = true;
    } else {
      for (int di = -radius; di <= radius; ++di)
        for (int dj = -radius; dj <= radius; ++dj) out[g.index(i + di, j + dj)] = true;
    }
  }
  return out;
}

namespace {

/// Sample offsets inside each dual cell, chosen off every grid line and diagonal.
constexpr double kSample1 = 0.37;
constexpr double kSample2 = 0.61;

void cover_segment(const PeriodicGrid& g, double a, double b, std::vector<int>& hits) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double h = g.spacing();
  // samples at (m + kSample1) h in [lo, hi)
  const long first = long(std::ceil(lo / h - kSample1));
  for (long m = first; (double(m) + kSample1) * h < hi; ++m) {
    if ((double(m) + kSample1) * h < lo) continue;
    ++hits[std::size_t(g.wrap(int(m % g.n())))];
  }
}

void cover_triangle(const PeriodicGrid& g, const std::array<std::array<double, 2>, 3>& v, std::vector<int>& hits) {
  const double h = g.spacing();
  const double area = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
  if (area == 0.0) return;
  double x0 = v[0][0], x1 = v[0][0], y0 = v[0][1], y1 = v[0][1];
  for (const auto& p : v) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  const long m0 = long(std::floor(x0 / h - kSample1)), m1 = long(std::ceil(x1 / h - kSample1));
  const long l0 = long(std::floor(y0 / h - kSample2)), l1 = long(std::ceil(y1 / h - kSample2));
  auto edge = [](const std::array<double, 2>& a, const std::array<double, 2>& b, double px, double py) {
    return (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0]);
  };
  for (long m = m0; m <= m1; ++m)
    for (long l = l0; l <= l1; ++l) {
      const double px = (double(m) + kSample1) * h, py = (double(l) + kSample2) * h;
      const double e0 = edge(v[0], v[1], px, py), e1 = edge(v[1], v[2], px, py), e2 = edge(v[2], v[0], px, py);
      const bool inside = area > 0.0 ? (e0 > 0.0 && e1 > 0.0 && e2 > 0.0) : (e0 < 0.0 && e1 < 0.0 && e2 < 0.0);
      if (inside) ++hits[g.index(g.wrap(int(m % g.n())), g.wrap(int(l % g.n())))];
    }
}

}  // namespace

ZeldovichMap zeldovich_map(const QuasiPeriodicConvex& phi) {
  const PeriodicGrid& g = phi.grid();
  const int n = g.n();
  const double inv_2h = 0.5 / g.spacing();
  ZeldovichMap z;
  z.displacement.resize(g.size());
  std::vector<int> hits(g.size(), 0);
  if (g.dim() == 1) {
    auto grad = [&](int i) { return (phi.total(i + 1) - phi.total(i - 1)) * inv_2h; };
    for (int i = 0; i < n; ++i) z.displacement[std::size_t(i)] = {grad(i), 0.0};
    for (int i = 0; i < n; ++i) cover_segment(g, grad(i), grad(i + 1), hits);
  } else {
    auto grad = [&](int i, int j) -> std::array<double, 2> {
      return {(phi.total(i + 1, j) - phi.total(i - 1, j)) * inv_2h, (phi.total(i, j + 1) - phi.total(i, j - 1)) * inv_2h};
    };
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto [i, j] = g.coords(k);
      z.displacement[k] = grad(i, j);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto a = grad(i, j), b = grad(i + 1, j), c = grad(i + 1, j + 1), d = grad(i, j + 1);
        cover_triangle(g, {a, b, c}, hits);
        cover_triangle(g, {a, c, d}, hits);
      }
  }
  z.multi_hit = std::size_t(std::count_if(hits.begin(), hits.end(), [](int c) { return c >= 2; }));
  return z;
}

namespace {

void validate_sites(int dim, const std::vector<Site>& sites) {
  if (sites.empty()) throw EmptySiteSet("site list is empty");
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (int d = 0; d < dim; ++d)
      if (!(sites[a][std::size_t(d)] >= 0.0 && sites[a][std::size_t(d)] < 1.0))
        throw InvalidArgument("sites must lie in [0,1)^n");
    for (std::size_t b = 0; b < a; ++b) {
      bool same = true;
      for (int d = 0; d < dim; ++d) same = same && sites[a][std::size_t(d)] == sites[b][std::size_t(d)];
      if (same) throw InvalidArgument("sites must be pairwise distinct");
    }
  }
}

/// Lattice offsets {-1,0,1}^n in a fixed order.
std::vector<std::array<int, 2>> translates(int dim) {
  std::vector<std::array<int, 2>> out;
  if (dim == 1) {
    for (int k = -1; k <= 1; ++k) out.push_back({k, 0});
  } else {
    for (int k1 = -1; k1 <= 1; ++k1)
      for (int k2 = -1; k2 <= 1; ++k2) out.push_back({k1, k2});
  }
  return out;
}

}  // namespace

QuasiPeriodicConvex tropical_limit(const QuasiPeriodicConvex& psi0, const std::vector<Site>& sites) {
  const PeriodicGrid& g = psi0.grid();
  const int dim = g.dim();
  validate_sites(dim, sites);
  std::vector<double> conj(sites.size());
  for (std::size_t s = 0; s < sites.size(); ++s)
    conj[s] = conjugate_at(psi0, std::span<const double>(sites[s].data(), std::size_t(dim)));
  const auto shifts = translates(dim);

  ScalarField u(g);
  parallel_for(g.size(), [&](std::size_t k) {
    const auto [i, j] = g.coords(k);
    const double y[2] = {g.coord(i), dim == 2 ? g.coord(j) : 0.0};
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sites.size(); ++s)
      for (const auto& kk : shifts) {
        double xy = 0.0, kx = 0.0, kk2 = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double x = sites[s][std::size_t(d)] + kk[std::size_t(d)];
          xy += x * y[d];
          kx += kk[std::size_t(d)] * sites[s][std::size_t(d)];
          kk2 += double(kk[std::size_t(d)] * kk[std::size_t(d)]);
        }
        best = std::max(best, xy - (conj[s] + kx + 0.5 * kk2));
      }
    u[k] = best - 0.5 * (y[0] * y[0] + y[1] * y[1]);
  });
  return QuasiPeriodicConvex(std::move(u));
}

namespace {

struct Nearest {
  int site = 0;
  int shift = 0;
};

Nearest nearest_lattice_point(int dim, const std::vector<Site>& sites, const std::vector<std::array<int, 2>>& shifts,
                              const double* y) {
  Nearest best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < sites.size(); ++s)
    for (std::size_t m = 0; m < shifts.size(); ++m) {
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double diff = y[d] - sites[s][std::size_t(d)] - shifts[m][std::size_t(d)];
        d2 += diff * diff;
      }
      if (d2 < best_d) {
        best_d = d2;
        best = {int(s), int(m)};
      }
    }
  return best;
}

}  // namespace

Tessellation voronoi_delaunay(const PeriodicGrid& g, const std::vector<Site>& sites) {
  const int dim = g.dim();
  validate_sites(dim, sites);
  const auto shifts = translates(dim);
  Tessellation tess{g, sites, std::vector<int>(g.size()), std::vector<bool>(g.size(), false), {}};

  std::vector<Nearest> here(g.size());
  parallel_for(g.size(), [&](std::size_t k) {
    const auto [i, j] = g.coords(k);
    const double y[2] = {g.coord(i), dim == 2 ? g.coord(j) : 0.0};
    here[k] = nearest_lattice_point(dim, sites, shifts, y);
  });
  for (std::size_t k = 0; k < g.size(); ++k) tess.voronoi_cell_id[k] = here[k].site;

  std::set<std::pair<int, int>> edges;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto [i, j] = g.coords(k);
    for (int axis = 0; axis < dim; ++axis) {
      // neighbour evaluated in the same chart, so a wrap does not fake a change of translate
      double y[2] = {g.coord(i), dim == 2 ? g.coord(j) : 0.0};
      y[axis] += g.spacing();
      const Nearest there = nearest_lattice_point(dim, sites, shifts, y);
      if (there.site == here[k].site && there.shift == here[k].shift) continue;
      const std::size_t nb = dim == 1 ? g.index(i + 1) : (axis == 0 ? g.index(i + 1, j) : g.index(i, j + 1));
      tess.boundary[k] = true;
      tess.boundary[nb] = true;
      if (there.site != here[k].site)
        edges.insert({std::min(there.site, here[k].site), std::max(there.site, here[k].site)});
    }
  }
  tess.delaunay_edges.assign(edges.begin(), edges.end());
  return tess;
}

ShockVoronoiAgreement shock_voronoi_agreement(const ShockSet& shocks, const Tessellation& tess) {
  if (!(shocks.grid == tess.grid)) throw InvalidArgument("shock_voronoi_agreement: grid mismatch");
  const std::vector<bool> ds = dilate(shocks.grid, shocks.mask, 1);
  const std::vector<bool> db = dilate(tess.grid, tess.boundary, 1);
  ShockVoronoiAgreement a;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (shocks.mask[k]) ++a.shock_nodes;
    if (tess.boundary[k]) ++a.boundary_nodes;
    if (shocks.mask[k] && !db[k]) ++a.mismatch;
    if (tess.boundary[k] && !ds[k]) ++a.mismatch;
    if (ds[k] != tess.boundary[k]) ++a.symmetric_difference;
  }
  return a;
}

void write_tessellation_csv(const std::string& path, const Tessellation& tess, const ShockSet& shocks) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path);
  out << "node_i,node_j,cell_id,is_shock\n";
  for (std::size_t k = 0; k < tess.voronoi_cell_id.size(); ++k) {
    const auto [i, j] = tess.grid.coords(k);
    out << i << ',' << j << ',' << tess.voronoi_cell_id[k] << ',' << (shocks.mask[k] ? 1 : 0) << '\n';
  }
}

void write_sites_csv(const std::string& path, const std::vector<Site>& sites) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path);
  out << "site,x,y\n";
  for (std::size_t s = 0; s < sites.size(); ++s)
    out << s << ',' << format_real(sites[s][0]) << ',' << format_real(sites[s][1]) << '\n';
}

}  // namespace rshock
