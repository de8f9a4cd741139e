#include "rshock/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rshock {

namespace detail {

std::vector<int> lower_hull(std::span<const double> x, std::span<const double> f) {
  std::vector<int> hull;
  hull.reserve(x.size());
  for (int k = 0; k < int(x.size()); ++k) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      const double cross = (x[b] - x[a]) * (f[k] - f[a]) - (f[b] - f[a]) * (x[k] - x[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(k);
  }
  return hull;
}

void conjugate_sorted(std::span<const double> x, std::span<const double> f, std::span<const double> y,
                      std::span<double> out, std::span<int> arg) {
  const std::vector<int> hull = lower_hull(x, f);
  std::size_t k = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double yj = y[j];
    while (k + 1 < hull.size()) {
      const int a = hull[k];
      const int b = hull[k + 1];
      // Advance only while the next vertex is strictly better.
      if (x[b] * yj - f[b] > x[a] * yj - f[a]) {
        ++k;
      } else {
        break;
      }
    }
    out[j] = x[hull[k]] * yj - f[hull[k]];
    arg[j] = hull[k];
  }
}

}  // namespace detail

namespace {

LegendreResult lft_1d(const QuasiPeriodicConvex& phi) {
  const PeriodicGrid& g = phi.grid();
  const int n = g.n();
  const int m = 3 * n;
  std::vector<double> x(static_cast<std::size_t>(m)), f(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) {
    x[std::size_t(e)] = g.coord(e - n);
    f[std::size_t(e)] = phi.total(e - n);
  }
  std::vector<double> y(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  std::vector<int> arg(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) y[std::size_t(j)] = g.coord(j);
  detail::conjugate_sorted(x, f, y, out, arg);

  std::vector<double> u(static_cast<std::size_t>(n));
  std::vector<ExtIndex> argmax(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    u[std::size_t(j)] = out[std::size_t(j)] - 0.5 * y[std::size_t(j)] * y[std::size_t(j)];
    argmax[std::size_t(j)] = {arg[std::size_t(j)] - n, 0};
  }
  return {QuasiPeriodicConvex(ScalarField(g, std::move(u))), std::move(argmax)};
}

LegendreResult lft_2d(const QuasiPeriodicConvex& phi) {
  const PeriodicGrid& g = phi.grid();
  const int n = g.n();
  const int m = 3 * n;
  std::vector<double> xe(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) xe[std::size_t(e)] = g.coord(e - n);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) y[std::size_t(j)] = g.coord(j);

  // Pass 1: partial[e2][j1] = max_{x1} x1 y1 - phi(x1, x2).
  std::vector<double> partial(std::size_t(m) * std::size_t(n));
  std::vector<int> arg1(std::size_t(m) * std::size_t(n));
  std::vector<double> row(static_cast<std::size_t>(m));
  for (int e2 = 0; e2 < m; ++e2) {
    for (int e1 = 0; e1 < m; ++e1) row[std::size_t(e1)] = phi.total(e1 - n, e2 - n);
    const std::size_t off = std::size_t(e2) * std::size_t(n);
    detail::conjugate_sorted(xe, row, y, std::span<double>(partial).subspan(off, std::size_t(n)),
                             std::span<int>(arg1).subspan(off, std::size_t(n)));
  }

  // Pass 2: dual(y1, y2) = max_{x2} x2 y2 + partial(x2; y1).
  std::vector<double> u(g.size());
  std::vector<ExtIndex> argmax(g.size());
  std::vector<double> col(static_cast<std::size_t>(m)), out(static_cast<std::size_t>(n));
  std::vector<int> arg2(static_cast<std::size_t>(n));
  for (int j1 = 0; j1 < n; ++j1) {
    for (int e2 = 0; e2 < m; ++e2) col[std::size_t(e2)] = -partial[std::size_t(e2) * std::size_t(n) + std::size_t(j1)];
    detail::conjugate_sorted(xe, col, y, out, arg2);
    for (int j2 = 0; j2 < n; ++j2) {
      const std::size_t k = g.index(j1, j2);
      const double y1 = y[std::size_t(j1)];
      const double y2 = y[std::size_t(j2)];
      u[k] = out[std::size_t(j2)] - 0.5 * (y1 * y1 + y2 * y2);
      const int e2 = arg2[std::size_t(j2)];
      const int e1 = arg1[std::size_t(e2) * std::size_t(n) + std::size_t(j1)];
      argmax[k] = {e1 - n, e2 - n};
    }
  }
  return {QuasiPeriodicConvex(ScalarField(g, std::move(u))), std::move(argmax)};
}

QuasiPeriodicConvex hull_1d(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  const int n = g.n();
  const int m = 3 * n;
  std::vector<double> x(static_cast<std::size_t>(m)), v(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) {
    const double xe = g.coord(e - n);
    x[std::size_t(e)] = xe;
    v[std::size_t(e)] = 0.5 * xe * xe + f.at(e - n);
  }
  const std::vector<int> hull = detail::lower_hull(x, v);
  std::vector<double> u(static_cast<std::size_t>(n));
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    const int e = i + n;
    while (seg + 1 < hull.size() && hull[seg + 1] <= e) ++seg;
    const int a = hull[seg];
    double val;
    if (a == e) {
      val = v[std::size_t(e)];
    } else {
      const int b = hull[seg + 1];
      const double w = (x[std::size_t(e)] - x[std::size_t(a)]) / (x[std::size_t(b)] - x[std::size_t(a)]);
      val = v[std::size_t(a)] + w * (v[std::size_t(b)] - v[std::size_t(a)]);
      val = std::min(val, v[std::size_t(e)]);
    }
    u[std::size_t(i)] = val - 0.5 * x[std::size_t(e)] * x[std::size_t(e)];
  }
  return QuasiPeriodicConvex(ScalarField(g, std::move(u)));
}

}  // namespace

LegendreResult lft(const QuasiPeriodicConvex& phi) { return phi.grid().dim() == 1 ? lft_1d(phi) : lft_2d(phi); }

QuasiPeriodicConvex convexify(const ScalarField& f) {
  if (f.grid().dim() == 1) return hull_1d(f);
  const QuasiPeriodicConvex phi(f);
  QuasiPeriodicConvex out = lft(lft(phi).dual).dual;
  // phi** <= phi holds exactly in exact arithmetic; clip rounding.
  for (std::size_t k = 0; k < f.size(); ++k) out.periodic()[k] = std::min(out.periodic()[k], f[k]);
  return out;
}

double isometry_defect(const QuasiPeriodicConvex& phi1, const QuasiPeriodicConvex& phi2) {
  const double primal = sup_distance(phi1.periodic(), phi2.periodic());
  const double dual = sup_distance(lft(phi1).dual.periodic(), lft(phi2).dual.periodic());
  return std::abs(dual - primal);
}

double conjugate_at(const QuasiPeriodicConvex& phi, std::span<const double> point) {
  const PeriodicGrid& g = phi.grid();
  const int n = g.n();
  if (int(point.size()) != g.dim()) throw InvalidArgument("conjugate_at: point dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  if (g.dim() == 1) {
    for (int e = -n; e < 2 * n; ++e) best = std::max(best, g.coord(e) * point[0] - phi.total(e));
  } else {
    for (int e1 = -n; e1 < 2 * n; ++e1)
      for (int e2 = -n; e2 < 2 * n; ++e2)
        best = std::max(best, g.coord(e1) * point[0] + g.coord(e2) * point[1] - phi.total(e1, e2));
  }
  return best;
}

}  // namespace rshock
