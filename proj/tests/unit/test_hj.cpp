#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "rshock/envelope.hpp"
#include "rshock/hj.hpp"
#include "rshock/legendre.hpp"
#include "rshock/shocks.hpp"

using namespace rshock;
using oracle::kPi;

TEST_SUITE_BEGIN("hj");

namespace {
ScalarField cosine(const PeriodicGrid& g, double a) {
  return ScalarField::sample(g, [a](double x) { return a * std::cos(2 * kPi * x); });
}
}  // namespace

TEST_CASE("second Hopf with H = 0 or t = 0 returns the convex datum") {
  PeriodicGrid g(1, 128);
  const QuasiPeriodicConvex psi0(oracle::random_convex_part(g, 5, 0.8));
  // the discrete biconjugate reproduces a smooth convex datum to O(h^2)
  const double tol = g.spacing() * g.spacing();
  CHECK(oracle::sup_abs(second_hopf(psi0, ScalarField(g), 1.0).psi, psi0.periodic()) <= tol);
  CHECK(oracle::sup_abs(second_hopf(psi0, cosine(g, 1.0), 0.0).psi, psi0.periodic()) <= tol);
  CHECK_THROWS_AS(second_hopf(psi0, cosine(g, 1.0), -1.0), InvalidArgument);
}

TEST_CASE("second Hopf is the Legendre dual of the envelope") {
  PeriodicGrid g(1, 256);
  const ScalarField H = cosine(g, 1.0);
  const auto env = project_convex(QuasiPeriodicConvex::quadratic(g), H, 1.0);
  const auto dual = oracle::brute_lft(env.as_convex());
  CHECK(oracle::sup_abs(second_hopf(QuasiPeriodicConvex::quadratic(g), H, 1.0).psi, dual) <= 5 * g.spacing());
}

TEST_CASE("Hopf-Lax of the quadratic has the closed form |y|^2 / (2 (1 + t))") {
  PeriodicGrid g(1, 128);
  for (double t : {0.5, 1.0}) {
    const auto sol = hopf_lax(ScalarField(g), 1.0, quadratic_conjugate, t);
    double err = 0.0;
    for (int i = 0; i < g.n(); ++i) {
      const double y = g.coord(i);
      err = std::max(err, std::abs(sol.psi[std::size_t(i)] + 0.5 * y * y - y * y / (2 * (1 + t))));
    }
    CHECK(err <= g.spacing());
  }
}

TEST_CASE("Hopf-Lax short-time limit and convexity") {
  PeriodicGrid g(1, 128);
  const ScalarField u0 = oracle::random_convex_part(g, 9, 0.5);
  const double t = 1e-3;
  const auto sol = hopf_lax(u0, 1.0, quadratic_conjugate, t);
  // optimal slopes stay within the Lipschitz range of psi0 (|p| <= 2 here)
  CHECK(oracle::sup_abs(sol.psi, u0) <= t * 0.5 * 4.0);
  // psi_t is not periodic for q = 1, so test interior second differences of the full values
  const auto later = hopf_lax(u0, 1.0, quadratic_conjugate, 0.5).psi;
  auto full = [&](int i) { return later.at(i) + 0.5 * g.coord(i) * g.coord(i); };
  double worst = 0.0;
  for (int i = 1; i + 1 < g.n(); ++i) worst = std::min(worst, full(i + 1) - 2 * full(i) + full(i - 1));
  // a minimum over finitely many parabolas: kinks of depth at most h^2 / t
  CHECK(worst >= -g.spacing() * g.spacing() / 0.5);
  CHECK_THROWS_AS(hopf_lax(u0, 1.0, quadratic_conjugate, 0.0), InvalidArgument);
}

TEST_CASE("Hopf-Lax in 2D matches the separable 1D solution") {
  PeriodicGrid g1(1, 16), g2(2, 16);
  const ScalarField a = ScalarField::sample(g1, [](double x) { return 0.05 * std::cos(2 * kPi * x); });
  const ScalarField b = ScalarField::sample(g2, [](double x, double y) {
    return 0.05 * std::cos(2 * kPi * x) + 0.05 * std::cos(2 * kPi * y);
  });
  const auto s1 = hopf_lax(a, 0.0, quadratic_conjugate, 0.3).psi;
  const auto s2 = hopf_lax(b, 0.0, quadratic_conjugate, 0.3).psi;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) CHECK(s2.at(i, j) == doctest::Approx(s1.at(i) + s1.at(j)).epsilon(1e-12));
}

TEST_CASE("Hopf duality") {
  PeriodicGrid g(1, 256);
  CHECK(hopf_duality_check(ScalarField(g), 1.0).defect <= 1e-12);
  const ScalarField phi0 = cosine(g, 0.2);
  const auto pre = hopf_duality_check(phi0, 0.1);
  CHECK(pre.defect <= 3 * g.spacing());
  const auto post = hopf_duality_check(phi0, 1.0);
  CHECK(post.defect <= 3 * g.spacing());
  CHECK(post.shock_mismatch <= 2);
  CHECK(extract_shocks(post.psi.as_convex()).count() > 0);
}

TEST_CASE("Burgers velocity") {
  PeriodicGrid g(1, 64);
  const double h = g.spacing();
  std::vector<double> affine, tent;
  for (int k = 0; k < 11; ++k) {
    affine.push_back(0.3 * k * h + 2.0);
    tent.push_back(std::abs(k - 5) * h * 0.7);
  }
  const auto va = burgers_velocity(affine, h);
  for (std::size_t k = 0; k < va.gap.size(); ++k) {
    CHECK(va.left[k] == doctest::Approx(0.3));
    CHECK(std::abs(va.gap[k]) <= 1e-12);
  }
  const auto vt = burgers_velocity(tent, h);
  CHECK(vt.gap[4] == doctest::Approx(1.4));
  CHECK(std::abs(vt.gap[0]) <= 1e-12);
  const auto vs = burgers_velocity(QuasiPeriodicConvex(oracle::random_convex_part(g, 2, 0.5)));
  for (double gap : vs.gap) CHECK(std::abs(gap) <= 2.0 * h);
  CHECK_THROWS_AS(burgers_velocity(std::vector<double>{1.0, 2.0}, h), InvalidArgument);
}

TEST_SUITE_END();
