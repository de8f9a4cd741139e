#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "rshock/envelope.hpp"
#include "rshock/legendre.hpp"

using namespace rshock;
using oracle::kPi;

TEST_SUITE_BEGIN("envelope");

namespace {
ScalarField cosine(const PeriodicGrid& g, double a) {
  return ScalarField::sample(g, [a](double x) { return a * std::cos(2 * kPi * x); });
}
}  // namespace

TEST_CASE("project_convex at t = 0 and before the first shock time") {
  PeriodicGrid g(1, 256);
  const auto phi0 = QuasiPeriodicConvex::quadratic(g);
  const ScalarField H = cosine(g, 1.0);
  const auto r0 = project_convex(phi0, H, 0.0);
  CHECK(r0.omega_count() == 0);
  CHECK(r0.projected.max() == 0.0);
  const double tstar = 1.0 / (4 * kPi * kPi);
  // the discrete second difference of cos is slightly smaller than 4 pi^2, so T* is still convex
  const auto r1 = project_convex(phi0, H, tstar);
  CHECK(r1.omega_count() == 0);
  CHECK(oracle::sup_abs(r1.projected, tstar * H) <= 1e-15);
}

TEST_CASE("project_convex after the first shock equals the hull oracle") {
  PeriodicGrid g(1, 256);
  const ScalarField H = cosine(g, 1.0);
  const auto r = project_convex(QuasiPeriodicConvex::quadratic(g), H, 1.0);
  CHECK(r.omega_count() > 0);
  CHECK(oracle::sup_abs(r.projected, oracle::monotone_chain_envelope(H)) <= 1e-9);
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("envelope curve laws on the cosine benchmark") {
  PeriodicGrid g(1, 256);
  const ScalarField H = cosine(g, 1.0);
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(0.05 * k);
  const auto curve = envelope_curve(QuasiPeriodicConvex::quadratic(g), H, ts);
  for (std::size_t k = 1; k < ts.size(); ++k)
    for (std::size_t m = 0; m < g.size(); ++m) {
      CHECK(curve[k].projected[m] - ts[k] * H[m] <= curve[k - 1].projected[m] - ts[k - 1] * H[m] + 1e-8);
      if (!curve[k - 1].coincidence[m]) CHECK_FALSE(curve[k].coincidence[m]);
      if (k + 1 < ts.size())
        CHECK(curve[k].projected[m] >= 0.5 * (curve[k - 1].projected[m] + curve[k + 1].projected[m]) - 1e-8);
    }
  // Omega_{0.5} inside Omega_{1.0}
  for (std::size_t m = 0; m < g.size(); ++m)
    if (!curve[10].coincidence[m]) CHECK_FALSE(curve[20].coincidence[m]);
  CHECK_THROWS_AS(envelope_curve(QuasiPeriodicConvex::quadratic(g), H, {0.5, 0.4}), NonMonotoneT);
}

TEST_CASE("envelope curve is constant for H = 0") {
  PeriodicGrid g(2, 16);
  const auto curve = envelope_curve(QuasiPeriodicConvex::quadratic(g), ScalarField(g), {0.0, 1.0, 2.0});
  for (const auto& r : curve) CHECK(oracle::sup_abs(r.projected, ScalarField(g)) <= 1e-14);
}

TEST_CASE("ddc poisson inverts a Fourier mode exactly") {
  PeriodicGrid g(2, 32);
  const ScalarField rhs = ScalarField::sample(g, [](double x, double y) { return std::cos(2 * kPi * x) + 0.5 * std::sin(4 * kPi * y); });
  const ScalarField f = solve_ddc_poisson(rhs);
  const double h = g.spacing();
  const double l1 = -4.0 / (h * h) * std::pow(std::sin(kPi * h), 2);
  const double l2 = -4.0 / (h * h) * std::pow(std::sin(2 * kPi * h), 2);
  const ScalarField expect = ScalarField::sample(g, [&](double x, double y) {
    return std::cos(2 * kPi * x) / (kDdcScale * l1) + 0.5 * std::sin(4 * kPi * y) / (kDdcScale * l2);
  });
  CHECK(oracle::sup_abs(f, expect) <= 1e-12);
}

TEST_CASE("obstacle that is itself admissible") {
  PeriodicGrid g(2, 16);
  ObstacleProblem2D prob(ScalarField::constant(g, 1.0), ScalarField(g));
  const auto r = project_psh_2d(prob);
  CHECK(oracle::sup_abs(r.projected, ScalarField(g)) == 0.0);
  CHECK(r.omega_count() == 0);
}

TEST_CASE("obstacle with a deep pit") {
  PeriodicGrid g(2, 32);
  ScalarField obstacle = ScalarField::constant(g, 1.0);
  obstacle[g.index(16, 16)] = -1.0;
  ObstacleProblem2D prob(ScalarField::constant(g, 1.0), obstacle);
  const auto r = project_psh_2d(prob);
  CHECK(r.residual <= 1e-8);
  CHECK(complementarity_residual(prob, r.projected) <= 1e-8);
  // u lies strictly below the obstacle on a ring around the pit and touches it far away
  CHECK_FALSE(r.coincidence[g.index(16, 17)]);
  CHECK_FALSE(r.coincidence[g.index(17, 16)]);
  CHECK(r.coincidence[g.index(0, 0)]);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(r.projected[k] <= obstacle[k] + 1e-12);
}

TEST_CASE("psor solution is the largest subsolution: a 2x finer grid agrees to O(h)") {
  auto solve = [](int n) {
    PeriodicGrid g(2, n);
    const ScalarField obstacle = ScalarField::sample(g, [](double x, double y) {
      return 0.05 * std::cos(2 * kPi * x) * std::cos(2 * kPi * y) + 0.02 * std::sin(2 * kPi * y);
    });
    return project_psh_2d(ObstacleProblem2D(ScalarField::constant(g, 0.2), obstacle));
  };
  const auto coarse = solve(16);
  const auto fine = solve(32);
  double err = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      err = std::max(err, std::abs(coarse.projected.at(i, j) - fine.projected.at(2 * i, 2 * j)));
  CHECK(err <= 0.02);
  CHECK(coarse.residual <= 1e-8);
  CHECK(fine.residual <= 1e-8);
}

TEST_CASE("Hele-Shaw obstacle") {
  PeriodicGrid g(2, 32);
  const double h = g.spacing();
  const ScalarField rho = ScalarField::constant(g, 1.0);
  const auto o0 = heleshaw_obstacle(rho, {16, 16}, 0.0, h * h);
  CHECK(oracle::sup_abs(o0.problem.obstacle, ScalarField(g)) == 0.0);
  CHECK(project_psh_2d(o0.problem).projected.max() == 0.0);
  const auto o1 = heleshaw_obstacle(rho, {16, 16}, 1.0, h * h);
  // barrier min(0, -f_eps) at the pole is log(eps) = 2 log h
  CHECK(o1.barrier[g.index(16, 16)] == doctest::Approx(2 * std::log(h)).epsilon(1e-12));
  const auto oa = heleshaw_obstacle(rho, {16, 16}, 0.3, h * h);
  const auto ob = heleshaw_obstacle(rho, {16, 16}, 0.6, h * h);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(ob.barrier[k] <= oa.barrier[k] + 1e-15);
}

TEST_CASE("regularized point mass has unit mass") {
  PeriodicGrid g(2, 64);
  const auto m = regularized_point_mass(g, {5, 60}, g.spacing() * g.spacing());
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += m[k] * g.spacing() * g.spacing();
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}
TEST_SUITE_END();
