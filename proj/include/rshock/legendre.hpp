#pragma once

#include <span>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

/// Node index on the one-period-padded domain [-N, 2N)^n; j is unused in 1D.
struct ExtIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const ExtIndex&, const ExtIndex&) = default;
};

struct LegendreResult {
  QuasiPeriodicConvex dual;
  /// Maximizing primal node per dual node (smallest index on ties).
  std::vector<ExtIndex> argmax;
};

/// Discrete Legendre-Fenchel transform on the quasi-periodic class.
///
/// dual(y) = max_x x.y - phi(x) with x ranging over the padded primal nodes
/// and y over the nodes of [0,1)^n. The result is returned through its
/// periodic part dual(y) - |y|^2/2. Runs in O(N^n) with the linear-time
/// (hull + slope merge) transform applied one axis at a time.
LegendreResult lft(const QuasiPeriodicConvex& phi);

/// Largest convex quasi-periodic function below |x|^2/2 + f on the grid.
///
/// 1D: exact lower hull of the padded samples, i.e. the biconjugate taken with
/// the continuous dual. 2D: double discrete transform (slopes restricted to
/// the grid), accurate to O(h).
QuasiPeriodicConvex convexify(const ScalarField& f);

/// | ||phi1* - phi2*||_inf - ||phi1 - phi2||_inf |.
double isometry_defect(const QuasiPeriodicConvex& phi1, const QuasiPeriodicConvex& phi2);

/// Conjugate of phi at an arbitrary point (not necessarily a node), by direct
/// maximization over the padded primal nodes.
double conjugate_at(const QuasiPeriodicConvex& phi, std::span<const double> point);

namespace detail {

/// Indices of the strict lower convex hull of (x[k], f[k]); x strictly increasing.
std::vector<int> lower_hull(std::span<const double> x, std::span<const double> f);

/// out[j] = max_k x[k] y[j] - f[k] for increasing x and y; arg[j] receives
/// the smallest maximizing k.
void conjugate_sorted(std::span<const double> x, std::span<const double> f, std::span<const double> y,
                      std::span<double> out, std::span<int> arg);

}  // namespace detail

}  // namespace rshock
