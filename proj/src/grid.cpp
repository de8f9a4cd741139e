#include "rshock/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rshock {

PeriodicGrid::PeriodicGrid(int dim, int n) : dim_(dim), n_(n), h_(0.0) {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid dim must be 1 or 2, got " + std::to_string(dim));
  if (n < 8) throw InvalidArgument("grid resolution must satisfy N >= 8, got N=" + std::to_string(n));
  h_ = 1.0 / n;
}

ScalarField::ScalarField(const PeriodicGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field length " + std::to_string(values_.size()) + " does not match grid size " +
                          std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("field contains a non-finite value");
}

ScalarField ScalarField::constant(const PeriodicGrid& grid, double c) {
  return ScalarField(grid, std::vector<double>(grid.size(), c));
}

ScalarField ScalarField::sample(const PeriodicGrid& grid, const std::function<double(double)>& f) {
  if (grid.dim() != 1) throw InvalidArgument("1D sampler used on a 2D grid");
  std::vector<double> v(grid.size());
  for (int i = 0; i < grid.n(); ++i) v[std::size_t(i)] = f(grid.coord(i));
  return ScalarField(grid, std::move(v));
}

ScalarField ScalarField::sample(const PeriodicGrid& grid, const std::function<double(double, double)>& f) {
  if (grid.dim() != 2) throw InvalidArgument("2D sampler used on a 1D grid");
  std::vector<double> v(grid.size());
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.n(); ++j) v[grid.index(i, j)] = f(grid.coord(i), grid.coord(j));
  return ScalarField(grid, std::move(v));
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / double(values_.size());
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  if (!(grid_ == o.grid_)) throw InvalidArgument("grid mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  if (!(grid_ == o.grid_)) throw InvalidArgument("grid mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator+(ScalarField a, double c) { return a += c; }

double sup_distance(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("grid mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double QuasiPeriodicConvex::total(int i) const {
  const double x = grid().coord(i);
  return 0.5 * x * x + u_.at(i);
}

double QuasiPeriodicConvex::total(int i, int j) const {
  const double x = grid().coord(i);
  const double y = grid().coord(j);
  return 0.5 * (x * x + y * y) + u_.at(i, j);
}

HessianField::HessianField(const PeriodicGrid& grid, std::vector<Sym2> nodes) : grid_(grid), nodes_(std::move(nodes)) {
  if (nodes_.size() != grid_.size()) throw InvalidArgument("Hessian field size mismatch");
}

double HessianField::trace(std::size_t k) const {
  const Sym2& s = nodes_[k];
  return grid_.dim() == 1 ? s.xx : s.xx + s.yy;
}

double HessianField::det(std::size_t k) const {
  const Sym2& s = nodes_[k];
  return grid_.dim() == 1 ? s.xx : s.xx * s.yy - s.xy * s.xy;
}

double HessianField::min_eig(std::size_t k) const {
  const Sym2& s = nodes_[k];
  if (grid_.dim() == 1) return s.xx;
  const double m = 0.5 * (s.xx + s.yy);
  const double r = std::hypot(0.5 * (s.xx - s.yy), s.xy);
  return m - r;
}

double HessianField::max_eig(std::size_t k) const {
  const Sym2& s = nodes_[k];
  if (grid_.dim() == 1) return s.xx;
  const double m = 0.5 * (s.xx + s.yy);
  const double r = std::hypot(0.5 * (s.xx - s.yy), s.xy);
  return m + r;
}

double MongeAmpereMeasure::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

double MongeAmpereMeasure::density(std::size_t k) const {
  const double cell = grid.dim() == 1 ? grid.spacing() : grid.spacing() * grid.spacing();
  return mass[k] / cell;
}

MongeAmpereMeasure MongeAmpereMeasure::uniform(const PeriodicGrid& grid) {
  const double cell = grid.dim() == 1 ? grid.spacing() : grid.spacing() * grid.spacing();
  return {grid, std::vector<double>(grid.size(), cell)};
}

HessianField discrete_hessian(const QuasiPeriodicConvex& phi) {
  const PeriodicGrid& g = phi.grid();
  const ScalarField& u = phi.periodic();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const int n = g.n();
  std::vector<Sym2> out(g.size());
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[std::size_t(i)].xx = 1.0 + (u.at(i + 1) - 2.0 * u.at(i) + u.at(i - 1)) * inv_h2;
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Sym2& s = out[g.index(i, j)];
        const double c = u.at(i, j);
        s.xx = 1.0 + (u.at(i + 1, j) - 2.0 * c + u.at(i - 1, j)) * inv_h2;
        s.yy = 1.0 + (u.at(i, j + 1) - 2.0 * c + u.at(i, j - 1)) * inv_h2;
        s.xy = (u.at(i + 1, j + 1) - u.at(i + 1, j - 1) - u.at(i - 1, j + 1) + u.at(i - 1, j - 1)) * 0.25 * inv_h2;
      }
    }
  }
  return HessianField(g, std::move(out));
}

double min_hessian_eigenvalue(const QuasiPeriodicConvex& phi) {
  const HessianField hess = discrete_hessian(phi);
  double m = hess.min_eig(0);
  for (std::size_t k = 1; k < hess.size(); ++k) m = std::min(m, hess.min_eig(k));
  return m;
}

bool is_discretely_convex(const QuasiPeriodicConvex& phi, double tol) { return min_hessian_eigenvalue(phi) >= -tol; }

MongeAmpereMeasure monge_ampere(const QuasiPeriodicConvex& phi) {
  const HessianField hess = discrete_hessian(phi);
  const PeriodicGrid& g = phi.grid();
  const double cell = g.dim() == 1 ? g.spacing() : g.spacing() * g.spacing();
  std::vector<double> mass(g.size());
  for (std::size_t k = 0; k < hess.size(); ++k) {
    const double lo = hess.min_eig(k);
    if (lo < -kNonConvexThreshold)
      throw NonConvexInput("monge_ampere: Hessian eigenvalue " + std::to_string(lo) + " at node " + std::to_string(k));
    mass[k] = std::max(hess.det(k), 0.0) * cell;
  }
  return {g, std::move(mass)};
}

double trace_norm(const HessianField& field) {
  double m = 0.0;
  for (std::size_t k = 0; k < field.size(); ++k) m = std::max(m, field.trace(k));
  return m;
}

ScalarField laplacian(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  ScalarField out(g);
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) out[std::size_t(i)] = (f.at(i + 1) - 2.0 * f.at(i) + f.at(i - 1)) * inv_h2;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[g.index(i, j)] =
            (f.at(i + 1, j) + f.at(i - 1, j) + f.at(i, j + 1) + f.at(i, j - 1) - 4.0 * f.at(i, j)) * inv_h2;
  }
  return out;
}

}  // namespace rshock
