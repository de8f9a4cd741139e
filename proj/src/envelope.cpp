#include "rshock/envelope.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "rshock/legendre.hpp"

namespace rshock {

std::size_t EnvelopeResult::omega_count() const {
  return std::size_t(std::count(coincidence.begin(), coincidence.end(), false));
}

EnvelopeResult project_convex(const QuasiPeriodicConvex& phi0, const ScalarField& hamiltonian, double t) {
  if (t < 0.0) throw InvalidArgument("project_convex: t must be nonnegative");
  const ScalarField obstacle = phi0.periodic() + t * hamiltonian;
  QuasiPeriodicConvex hull = convexify(obstacle);
  std::vector<bool> mask(obstacle.size());
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = hull.periodic()[k] >= obstacle[k] - kContactTol;

  double omega_mass = 0.0;
  if (hull.grid().dim() == 1) {
    const MongeAmpereMeasure ma = monge_ampere(hull);
    for (std::size_t k = 0; k < mask.size(); ++k)
      if (!mask[k]) omega_mass += ma.mass[k];
  }
  return {std::move(hull.periodic()), std::move(mask), omega_mass, 0};
}

std::vector<EnvelopeResult> envelope_curve(const QuasiPeriodicConvex& phi0, const ScalarField& hamiltonian,
                                           const std::vector<double>& t_list) {
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    if (t_list[k] < 0.0) throw NonMonotoneT("envelope_curve: negative time");
    if (k > 0 && !(t_list[k] > t_list[k - 1])) throw NonMonotoneT("envelope_curve: times must be strictly increasing");
  }
  std::vector<EnvelopeResult> out;
  out.reserve(t_list.size());
  for (double t : t_list) out.push_back(project_convex(phi0, hamiltonian, t));
  return out;
}

ObstacleProblem2D::ObstacleProblem2D(ScalarField density_, ScalarField obstacle_)
    : grid(density_.grid()),
      density(std::move(density_)),
      obstacle(std::move(obstacle_)),
      singular(grid.size(), false) {
  if (grid.dim() != 2) throw InvalidArgument("ObstacleProblem2D requires a 2D grid");
  if (!(obstacle.grid() == grid)) throw InvalidArgument("ObstacleProblem2D: grid mismatch");
  for (std::size_t k = 0; k < density.size(); ++k)
    if (density[k] < 0.0) throw InvalidArgument("ObstacleProblem2D: negative density");
}

namespace {

double ddc_residual_at(const ObstacleProblem2D& pb, const ScalarField& u, int i, int j, double inv_h2) {
  const double lap =
      (u.at(i + 1, j) + u.at(i - 1, j) + u.at(i, j + 1) + u.at(i, j - 1) - 4.0 * u.at(i, j)) * inv_h2;
  const std::size_t k = pb.grid.index(i, j);
  const double pde = kDdcScale * lap + pb.density[k];
  return std::abs(std::min(pb.obstacle[k] - u[k], pde));
}

}  // namespace

double complementarity_residual(const ObstacleProblem2D& problem, const ScalarField& u) {
  const PeriodicGrid& g = problem.grid;
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  double r = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j) {
      if (problem.singular[g.index(i, j)]) continue;
      r = std::max(r, ddc_residual_at(problem, u, i, j, inv_h2));
    }
  return r;
}

EnvelopeResult project_psh_2d(const ObstacleProblem2D& problem, const PsorOptions& options,
                              const std::optional<ScalarField>& initial) {
  const PeriodicGrid& g = problem.grid;
  const int n = g.n();
  const double h2 = g.spacing() * g.spacing();
  // Gauss-Seidel target u = (sum of neighbours + 4 pi h^2 rho) / 4.
  const double src_scale = h2 / kDdcScale;

  ScalarField u = initial ? *initial : problem.obstacle;
  if (!(u.grid() == g)) throw InvalidArgument("project_psh_2d: initial guess grid mismatch");
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (problem.singular[k]) u[k] = problem.obstacle[k];
    u[k] = std::min(u[k], problem.obstacle[k]);
  }

  std::span<double> uv = u.values();
  const std::span<const double> obs = problem.obstacle.values();
  const std::span<const double> rho = problem.density.values();
  const double w = options.relaxation;

  long sweep = 0;
  double residual = complementarity_residual(problem, u);
  while (residual > options.tol) {
    if (sweep >= options.max_sweeps)
      throw MaxIterations("project_psh_2d: residual " + std::to_string(residual) + " after " +
                          std::to_string(sweep) + " sweeps");
    for (int s = 0; s < options.check_every; ++s) {
      for (int i = 0; i < n; ++i) {
        const std::size_t row = std::size_t(i) * std::size_t(n);
        const std::size_t up = std::size_t(g.wrap(i - 1)) * std::size_t(n);
        const std::size_t down = std::size_t(g.wrap(i + 1)) * std::size_t(n);
        for (int j = 0; j < n; ++j) {
          const std::size_t k = row + std::size_t(j);
          if (problem.singular[k]) continue;
          const std::size_t jl = std::size_t(j == 0 ? n - 1 : j - 1);
          const std::size_t jr = std::size_t(j == n - 1 ? 0 : j + 1);
          const double nb = uv[up + std::size_t(j)] + uv[down + std::size_t(j)] + uv[row + jl] + uv[row + jr];
          const double gs = 0.25 * (nb + src_scale * rho[k]);
          const double relaxed = uv[k] + w * (gs - uv[k]);
          uv[k] = std::min(obs[k], relaxed);
        }
      }
    }
    sweep += options.check_every;
    residual = complementarity_residual(problem, u);
  }

  std::vector<bool> mask(u.size());
  for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = u[k] >= obs[k] - kContactTol;
  return {std::move(u), std::move(mask), residual, sweep};
}

ScalarField solve_ddc_poisson(const ScalarField& rhs) {
  const PeriodicGrid& g = rhs.grid();
  if (g.dim() != 2) throw InvalidArgument("solve_ddc_poisson requires a 2D grid");
  const int n = g.n();
  const int nc = n / 2 + 1;
  std::vector<double> in(rhs.values().begin(), rhs.values().end());
  std::vector<std::complex<double>> spec(std::size_t(n) * std::size_t(nc));
  auto* spec_ptr = reinterpret_cast<fftw_complex*>(spec.data());

  fftw_plan fwd = fftw_plan_dft_r2c_2d(n, n, in.data(), spec_ptr, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);

  const double h = g.spacing();
  for (int k1 = 0; k1 < n; ++k1) {
    const double s1 = std::sin(std::numbers::pi * k1 / n);
    for (int k2 = 0; k2 < nc; ++k2) {
      const double s2 = std::sin(std::numbers::pi * k2 / n);
      const std::size_t k = std::size_t(k1) * std::size_t(nc) + std::size_t(k2);
      if (k1 == 0 && k2 == 0) {
        spec[k] = 0.0;
        continue;
      }
      const double symbol = -kDdcScale * 4.0 * (s1 * s1 + s2 * s2) / (h * h);
      spec[k] /= symbol;
    }
  }

  std::vector<double> out(g.size());
  fftw_plan bwd = fftw_plan_dft_c2r_2d(n, n, spec_ptr, out.data(), FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);
  const double norm = 1.0 / double(g.size());
  for (double& v : out) v *= norm;
  return ScalarField(g, std::move(out));
}

namespace {

double torus_dist2(const PeriodicGrid& g, int i, int j, std::array<int, 2> p) {
  const int n = g.n();
  int di = std::abs(g.wrap(i - p[0]));
  int dj = std::abs(g.wrap(j - p[1]));
  di = std::min(di, n - di);
  dj = std::min(dj, n - dj);
  const double h = g.spacing();
  return (double(di) * double(di) + double(dj) * double(dj)) * h * h;
}

}  // namespace

ScalarField regularized_point_mass(const PeriodicGrid& grid, std::array<int, 2> p, double epsilon) {
  if (grid.dim() != 2) throw InvalidArgument("regularized_point_mass requires a 2D grid");
  if (!(epsilon > 0.0)) throw InvalidArgument("regularized_point_mass: epsilon must be positive");
  ScalarField bump(grid);
  double mass = 0.0;
  for (int i = 0; i < grid.n(); ++i)
    for (int j = 0; j < grid.n(); ++j) {
      const double d2 = torus_dist2(grid, i, j, p);
      const double v = epsilon / (std::numbers::pi * (d2 + epsilon) * (d2 + epsilon));
      bump[grid.index(i, j)] = v;
      mass += v;
    }
  bump *= 1.0 / (mass * grid.spacing() * grid.spacing());
  return bump;
}

ScalarField log_pole_potential(const ScalarField& rho0, std::array<int, 2> p, double epsilon) {
  const PeriodicGrid& g = rho0.grid();
  ScalarField f = solve_ddc_poisson(rho0 - regularized_point_mass(g, p, epsilon));
  f += -std::log(epsilon) - f.at(p[0], p[1]);
  return f;
}

HeleShawObstacle heleshaw_obstacle(const ScalarField& rho0, std::array<int, 2> p, double lambda, double epsilon) {
  const PeriodicGrid& g = rho0.grid();
  if (g.dim() != 2) throw InvalidArgument("heleshaw_obstacle requires a 2D grid");
  if (!(epsilon > 0.0)) throw InvalidArgument("heleshaw_obstacle: epsilon must be positive");
  if (lambda < 0.0 || lambda > 1.0) throw InvalidArgument("heleshaw_obstacle: lambda must lie in [0,1]");
  double mass = 0.0;
  for (double v : rho0.values()) {
    if (v < 0.0) throw InvalidArgument("heleshaw_obstacle: rho0 must be nonnegative");
    mass += v;
  }
  mass *= g.spacing() * g.spacing();
  if (std::abs(mass - 1.0) > 1e-8) throw InvalidArgument("heleshaw_obstacle: rho0 must have unit mass");

  const ScalarField f = log_pole_potential(rho0, p, epsilon);
  ScalarField shift = lambda * f;
  ScalarField barrier(g);
  for (std::size_t k = 0; k < barrier.size(); ++k) barrier[k] = std::min(0.0, -shift[k]);
  ObstacleProblem2D problem((1.0 - lambda) * rho0, shift);
  return {std::move(problem), std::move(shift), std::move(barrier), lambda};
}

}  // namespace rshock
