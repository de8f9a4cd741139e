#include "rshock/heleshaw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rshock/field_io.hpp"
#include "rshock/parallel.hpp"
#include "rshock/shocks.hpp"

namespace rshock {

namespace {

double resolve_epsilon(const PeriodicGrid& g, const HeleShawOptions& o) {
  return o.epsilon > 0.0 ? o.epsilon : g.spacing() * g.spacing();
}

HSState solve_lambda(const ScalarField& rho0, std::array<int, 2> p, double lambda, const HeleShawOptions& o) {
  const PeriodicGrid& g = rho0.grid();
  const HeleShawObstacle hs = heleshaw_obstacle(rho0, p, lambda, resolve_epsilon(g, o));
  const EnvelopeResult env = project_psh_2d(hs.problem, o.psor);
  ScalarField phi = env.projected - hs.shift;
  std::vector<bool> omega(g.size());
  double area = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    phi[k] = std::min(phi[k], 0.0);
    omega[k] = !env.coincidence[k];
    if (omega[k]) area += rho0[k];
  }
  area *= g.spacing() * g.spacing();
  return {lambda, std::move(phi), std::move(omega), area, env.iterations, env.residual};
}

}  // namespace

std::vector<HSState> hs_sweep(const ScalarField& rho0, std::array<int, 2> p, const std::vector<double>& lambdas,
                              const HeleShawOptions& options) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (lambdas[k] < 0.0 || lambdas[k] >= 1.0) throw InvalidArgument("hs_sweep: lambda must lie in [0,1)");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw NonMonotoneT("hs_sweep: lambdas must be strictly increasing");
  }
  for (double v : rho0.values())
    if (!(v > 0.0)) throw InvalidArgument("hs_sweep: rho0 must be positive");
  std::vector<std::optional<HSState>> slots(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t k) { slots[k] = solve_lambda(rho0, p, lambdas[k], options); });
  std::vector<HSState> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void write_hs_sweep_csv(const std::string& path, const std::vector<HSState>& states) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path);
  out << "lambda,area,defect_vs_lambda,iterations\n";
  for (const HSState& s : states)
    out << format_real(s.lambda) << ',' << format_real(s.area) << ',' << format_real(s.area - s.lambda) << ','
        << s.iterations << '\n';
}

std::vector<bool> boundary_band(const PeriodicGrid& g, const std::vector<bool>& mask, int radius) {
  std::vector<bool> edge(mask.size(), false);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto [i, j] = g.coords(k);
    const std::size_t nb[4] = {g.index(i + 1, j), g.index(i - 1, j), g.index(i, j + 1), g.index(i, j - 1)};
    for (std::size_t m : nb)
      if (mask[m] != mask[k]) edge[k] = true;
  }
  return radius > 0 ? dilate(g, edge, radius - 1) : edge;
}

std::vector<HSEnvelopeComparison> hs_vs_envelope_curve(const ScalarField& rho0, std::array<int, 2> p,
                                                       const std::vector<double>& t_list,
                                                       const HeleShawOptions& options) {
  const PeriodicGrid& g = rho0.grid();
  const double eps = resolve_epsilon(g, options);
  const ScalarField f = log_pole_potential(rho0, p, eps);
  std::vector<double> lambdas;
  for (double t : t_list) {
    if (t < 0.0) throw InvalidArgument("hs_vs_envelope_curve: t must be nonnegative");
    lambdas.push_back(t / (t + 1.0));
  }
  std::vector<std::optional<HSEnvelopeComparison>> slots(t_list.size());
  parallel_for(t_list.size(), [&](std::size_t k) {
    const double t = t_list[k];
    const ObstacleProblem2D problem(rho0, t * f);
    const EnvelopeResult env = project_psh_2d(problem, options.psor);
    const HSState hs = solve_lambda(rho0, p, lambdas[k], options);
    HSEnvelopeComparison c{t, lambdas[k], 0, 0, 0};
    const std::vector<bool> band = boundary_band(g, hs.omega_mask, 1);
    for (std::size_t m = 0; m < g.size(); ++m) {
      if (env.coincidence[m] == hs.omega_mask[m]) ++c.defect;
      if (hs.omega_mask[m]) ++c.omega_nodes;
      if (hs.omega_mask[m] && band[m]) ++c.boundary_band;
    }
    slots[k] = c;
  });
  std::vector<HSEnvelopeComparison> out;
  for (auto& s : slots) out.push_back(*s);
  return out;
}

ScalarField hs_flow_source(const ScalarField& rho0, std::array<int, 2> p, double epsilon) {
  return rho0 - regularized_point_mass(rho0.grid(), p, epsilon);
}

HSDensityDefect hs_density_limit(const LogDiffusionState& flow, const ScalarField& rho0, std::array<int, 2> p,
                                 const HeleShawOptions& options, int band) {
  const PeriodicGrid& g = rho0.grid();
  const double t = flow.t;
  const double lambda = t / (t + 1.0);
  HSDensityDefect d{t, lambda, 0.0, HUGE_VAL, -HUGE_VAL, 0};
  std::vector<bool> omega(g.size(), false);
  if (lambda > 0.0) omega = hs_sweep(rho0, p, {lambda}, options).front().omega_mask;
  std::vector<bool> skip = boundary_band(g, omega, band);
  std::vector<bool> pole(g.size(), false);
  pole[g.index(p[0], p[1])] = true;
  const std::vector<bool> near_pole = dilate(g, pole, band);
  const ScalarField rho = flow.density();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (skip[k] || near_pole[k]) continue;
    const double target = omega[k] ? 0.0 : (t + 1.0) * rho0[k];
    d.defect = std::max(d.defect, std::abs(rho[k] - target));
    if (!omega[k]) {
      d.ratio_min = std::min(d.ratio_min, rho[k] / rho0[k]);
      d.ratio_max = std::max(d.ratio_max, rho[k] / rho0[k]);
    }
    ++d.compared;
  }
  return d;
}

}  // namespace rshock
