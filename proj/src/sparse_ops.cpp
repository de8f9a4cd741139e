#include "sparse_ops.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

namespace rshock::detail {

SparseMatrix negative_laplacian(const PeriodicGrid& grid) {
  const int n = grid.n();
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  std::vector<Eigen::Triplet<double>> trips;
  if (grid.dim() == 1) {
    trips.reserve(3 * std::size_t(n));
    for (int i = 0; i < n; ++i) {
      const int r = int(grid.index(i));
      trips.emplace_back(r, r, 2.0 * inv_h2);
      trips.emplace_back(r, int(grid.index(i + 1)), -inv_h2);
      trips.emplace_back(r, int(grid.index(i - 1)), -inv_h2);
    }
  } else {
    trips.reserve(5 * grid.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int r = int(grid.index(i, j));
        trips.emplace_back(r, r, 4.0 * inv_h2);
        trips.emplace_back(r, int(grid.index(i + 1, j)), -inv_h2);
        trips.emplace_back(r, int(grid.index(i - 1, j)), -inv_h2);
        trips.emplace_back(r, int(grid.index(i, j + 1)), -inv_h2);
        trips.emplace_back(r, int(grid.index(i, j - 1)), -inv_h2);
      }
  }
  SparseMatrix m(Eigen::Index(grid.size()), Eigen::Index(grid.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Vector to_vector(const ScalarField& f) {
  Vector v(Eigen::Index(f.size()));
  for (std::size_t k = 0; k < f.size(); ++k) v[Eigen::Index(k)] = f[k];
  return v;
}

ScalarField to_field(const PeriodicGrid& grid, const Vector& v) {
  return ScalarField(grid, std::vector<double>(v.data(), v.data() + v.size()));
}

namespace {

constexpr double kMaxLog = 700.0;

double merit(const SparseMatrix& L, double k, double c, const Vector& r, const Vector& w) {
  if (w.maxCoeff() > kMaxLog) return HUGE_VAL;
  return k * w.array().exp().sum() + 0.5 * c * w.dot(L * w) - r.dot(w);
}

}  // namespace

bool solve_exp_diffusion(const SparseMatrix& L, double k, double c, const Vector& r, Vector& w, double tol,
                         int max_iters) {
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  SparseMatrix J = c * L;
  solver.analyzePattern(J);
  for (int it = 0; it < max_iters; ++it) {
    const Vector ew = w.array().exp();
    const Vector g = k * ew + c * (L * w) - r;
    if (!g.allFinite()) return false;
    if (g.cwiseAbs().maxCoeff() <= tol * scale) return true;

    J = c * L;
    for (Eigen::Index i = 0; i < w.size(); ++i) J.coeffRef(i, i) += k * ew[i] + 1e-300;
    solver.factorize(J);
    if (solver.info() != Eigen::Success) return false;
    const Vector delta = solver.solve(-g);
    if (!delta.allFinite()) return false;

    // Armijo on the convex merit far from the root; close to it the merit is
    // flat to rounding, so a decrease of the residual is accepted as well.
    const double f0 = merit(L, k, c, r, w);
    const double g0 = g.cwiseAbs().maxCoeff();
    const double slope = g.dot(delta);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !accepted; ++ls, alpha *= 0.5) {
      const Vector trial = w + alpha * delta;
      if (!trial.allFinite() || trial.maxCoeff() > kMaxLog) continue;
      const double f1 = merit(L, k, c, r, trial);
      const Vector gt = k * trial.array().exp().matrix() + c * (L * trial) - r;
      if ((std::isfinite(f1) && f1 <= f0 + 1e-4 * alpha * slope) || gt.cwiseAbs().maxCoeff() <= (1.0 - 0.5 * alpha) * g0) {
        w = trial;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  const Vector g = k * w.array().exp().matrix() + c * (L * w) - r;
  return g.allFinite() && g.cwiseAbs().maxCoeff() <= tol * scale;
}

}  // namespace rshock::detail
