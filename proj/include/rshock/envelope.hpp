#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

/// dd^c u on the flat 2-torus is (5-point Laplacian of u) / (4 pi): with this
/// scale a unit-mass area form rho satisfies sum(rho h^2) = 1 and the
/// positivity condition of an omega_0-psh potential reads
/// kDdcScale * lap_h(u) + rho0 >= 0.
inline constexpr double kDdcScale = 0.07957747154594767;  // 1 / (4 pi)

/// Nodes with projected >= obstacle - kContactTol count as coincidence nodes.
inline constexpr double kContactTol = 1e-9;

struct EnvelopeResult {
  ScalarField projected;
  /// true on the coincidence set C, false on its complement Omega.
  std::vector<bool> coincidence;
  double residual = 0.0;
  long iterations = 0;

  QuasiPeriodicConvex as_convex() const { return QuasiPeriodicConvex(projected); }
  std::size_t omega_count() const;
};

/// Convex envelope of phi0 + tH: convexify(u0 + tH) with its coincidence mask.
/// residual holds the Monge-Ampere mass found on Omega.
EnvelopeResult project_convex(const QuasiPeriodicConvex& phi0, const ScalarField& hamiltonian, double t);

/// project_convex at every t of a strictly increasing, nonnegative list.
/// Throws NonMonotoneT otherwise.
std::vector<EnvelopeResult> envelope_curve(const QuasiPeriodicConvex& phi0, const ScalarField& hamiltonian,
                                           const std::vector<double>& t_list);

/// Obstacle problem for omega_0-psh envelopes on the 2-torus.
struct ObstacleProblem2D {
  PeriodicGrid grid;
  /// Area-form density; nonnegative.
  ScalarField density;
  ScalarField obstacle;
  /// Flagged nodes are pinned to the obstacle and excluded from the residual.
  std::vector<bool> singular;

  ObstacleProblem2D(ScalarField density, ScalarField obstacle);
};

struct PsorOptions {
  double relaxation = 1.5;
  double tol = 1e-8;
  long max_sweeps = 1'000'000;
  int check_every = 50;
};

/// Largest u <= obstacle with kDdcScale * lap_h(u) + density >= 0, computed by
/// projected SOR in row-major sweep order. residual is the max over
/// non-singular nodes of |min(obstacle - u, kDdcScale lap_h u + density)|.
/// Throws MaxIterations if the tolerance is not met within max_sweeps.
EnvelopeResult project_psh_2d(const ObstacleProblem2D& problem, const PsorOptions& options = {},
                              const std::optional<ScalarField>& initial = std::nullopt);

/// Complementarity residual of a candidate solution (same definition as above).
double complementarity_residual(const ObstacleProblem2D& problem, const ScalarField& u);

/// Periodic solution of kDdcScale * lap_h(f) = rhs - mean(rhs), mean(f) = 0.
ScalarField solve_ddc_poisson(const ScalarField& rhs);

/// Unit-mass discrete bump eps / (pi (d^2 + eps)^2) around node p (torus distance).
ScalarField regularized_point_mass(const PeriodicGrid& grid, std::array<int, 2> p, double epsilon);

/// Potential f_eps of rho0 - delta_p: kDdcScale lap_h f = rho0 - regularized_point_mass,
/// normalized so that f(p) = -log(eps). Near p, -f_eps behaves like log(|z-p|^2 + eps).
ScalarField log_pole_potential(const ScalarField& rho0, std::array<int, 2> p, double epsilon);

/// Hele-Shaw envelope at parameter lambda in the pole-absorbed form.
///
/// The envelope phi_lambda = sup{ phi omega_0-psh : phi <= 0, phi <= lambda log|z-p|^2 + O(1) }
/// is recovered as phi_lambda = v - shift, where v solves `problem`
/// (density (1 - lambda) rho0, obstacle lambda f_eps) and shift = lambda f_eps.
/// `barrier` is the equivalent single obstacle min(0, -lambda f_eps) on the
/// phi side.
struct HeleShawObstacle {
  ObstacleProblem2D problem;
  ScalarField shift;
  ScalarField barrier;
  double lambda;
};

HeleShawObstacle heleshaw_obstacle(const ScalarField& rho0, std::array<int, 2> p, double lambda, double epsilon);

}  // namespace rshock
