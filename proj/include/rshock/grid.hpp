#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rshock/errors.hpp"

namespace rshock {

/// Absolute tolerance on Hessian eigenvalues for the discrete convexity check.
inline constexpr double kConvexityTol = 1e-9;
/// Eigenvalues below this make monge_ampere() reject its input.
inline constexpr double kNonConvexThreshold = 1e-6;

/// Uniform grid on the unit torus R^n / Z^n, n in {1, 2}.
///
/// Node (i, j) sits at (i h, j h) with h = 1/N. Storage is row-major with the
/// first axis outermost: flat index = i * N + j.
class PeriodicGrid {
 public:
  PeriodicGrid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double spacing() const { return h_; }
  std::size_t size() const { return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * std::size_t(n_); }

  int wrap(int i) const {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }
  std::size_t index(int i) const { return std::size_t(wrap(i)); }
  std::size_t index(int i, int j) const { return std::size_t(wrap(i)) * std::size_t(n_) + std::size_t(wrap(j)); }

  /// Axis indices of a flat index; the second entry is 0 in 1D.
  std::array<int, 2> coords(std::size_t flat) const {
    if (dim_ == 1) return {int(flat), 0};
    return {int(flat / std::size_t(n_)), int(flat % std::size_t(n_))};
  }
  double coord(int i) const { return i * h_; }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.dim_ == b.dim_ && a.n_ == b.n_;
  }

 private:
  int dim_;
  int n_;
  double h_;
};

/// Periodic samples, one per grid node.
class ScalarField {
 public:
  explicit ScalarField(const PeriodicGrid& grid);
  ScalarField(const PeriodicGrid& grid, std::vector<double> values);

  static ScalarField constant(const PeriodicGrid& grid, double c);
  /// Samples f(x) (1D) at every node.
  static ScalarField sample(const PeriodicGrid& grid, const std::function<double(double)>& f);
  /// Samples f(x, y) (2D) at every node.
  static ScalarField sample(const PeriodicGrid& grid, const std::function<double(double, double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(int i) const { return values_[grid_.index(i)]; }
  double at(int i, int j) const { return values_[grid_.index(i, j)]; }

  double max() const;
  double min() const;
  double mean() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double c);

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator+(ScalarField a, double c);

/// Sup norm of a - b.
double sup_distance(const ScalarField& a, const ScalarField& b);

/// Element phi(x) = |x|^2/2 + u(x) of the quasi-periodic class; only the
/// periodic part u is stored. Convexity is a checked property
/// (is_discretely_convex), not a construction-time guarantee, so non-convex
/// members such as phi0 + tH past the first shock time can be represented.
class QuasiPeriodicConvex {
 public:
  explicit QuasiPeriodicConvex(ScalarField periodic) : u_(std::move(periodic)) {}
  static QuasiPeriodicConvex quadratic(const PeriodicGrid& grid) { return QuasiPeriodicConvex(ScalarField(grid)); }

  const PeriodicGrid& grid() const { return u_.grid(); }
  const ScalarField& periodic() const { return u_; }
  ScalarField& periodic() { return u_; }

  /// phi at the (possibly out-of-domain) node index (i) or (i, j).
  double total(int i) const;
  double total(int i, int j) const;

 private:
  ScalarField u_;
};

/// Symmetric 2x2 matrix; in 1D only xx is used.
struct Sym2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};

/// Per-node symmetric n x n matrices.
class HessianField {
 public:
  HessianField(const PeriodicGrid& grid, std::vector<Sym2> nodes);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return nodes_.size(); }
  const Sym2& operator[](std::size_t k) const { return nodes_[k]; }

  double trace(std::size_t k) const;
  double det(std::size_t k) const;
  double min_eig(std::size_t k) const;
  double max_eig(std::size_t k) const;

 private:
  PeriodicGrid grid_;
  std::vector<Sym2> nodes_;
};

/// Cell masses of det(D^2 phi) dx on the grid.
struct MongeAmpereMeasure {
  PeriodicGrid grid;
  std::vector<double> mass;

  double total() const;
  /// Density mass / h^n at node k.
  double density(std::size_t k) const;
  static MongeAmpereMeasure uniform(const PeriodicGrid& grid);
};

/// Centered second differences of u plus the identity, periodic wrap.
HessianField discrete_hessian(const QuasiPeriodicConvex& phi);

double min_hessian_eigenvalue(const QuasiPeriodicConvex& phi);
bool is_discretely_convex(const QuasiPeriodicConvex& phi, double tol = kConvexityTol);

/// Cell mass max(det D^2 phi, 0) h^n per node. Throws NonConvexInput when the
/// smallest Hessian eigenvalue is below -kNonConvexThreshold.
MongeAmpereMeasure monge_ampere(const QuasiPeriodicConvex& phi);

/// Sup over nodes of the trace.
double trace_norm(const HessianField& field);

/// 5-point (1D: 3-point) Laplacian without the dd^c scaling.
ScalarField laplacian(const ScalarField& f);

}  // namespace rshock
