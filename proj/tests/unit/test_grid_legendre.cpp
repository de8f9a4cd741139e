#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../oracles.hpp"
#include "rshock/field_io.hpp"
#include "rshock/grid.hpp"
#include "rshock/legendre.hpp"

using namespace rshock;
using oracle::kPi;

TEST_SUITE_BEGIN("grid_legendre");

TEST_CASE("grid rejects small N and bad dimensions") {
  CHECK_THROWS_AS(PeriodicGrid(1, 3), InvalidArgument);
  CHECK_THROWS_AS(PeriodicGrid(3, 16), InvalidArgument);
  CHECK_NOTHROW(PeriodicGrid(2, 8));
}

TEST_CASE("hessian of the quadratic is the identity") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, 16);
    const HessianField h = discrete_hessian(QuasiPeriodicConvex::quadratic(g));
    for (std::size_t k = 0; k < h.size(); ++k) {
      CHECK(h[k].xx == 1.0);
      if (dim == 2) {
        CHECK(h[k].yy == 1.0);
        CHECK(h[k].xy == 0.0);
      }
    }
  }
}

TEST_CASE("hessian of a small cosine matches the analytic second derivative to O(h^2)") {
  PeriodicGrid g(1, 128);
  const double eps = 1e-3;
  const auto h = discrete_hessian(QuasiPeriodicConvex(ScalarField::sample(g, [&](double x) { return eps * std::cos(2 * kPi * x); })));
  double err = 0.0;
  for (int i = 0; i < g.n(); ++i)
    err = std::max(err, std::abs(h[std::size_t(i)].xx - (1.0 - 4 * kPi * kPi * eps * std::cos(2 * kPi * g.coord(i)))));
  CHECK(err <= 4 * kPi * kPi * eps * 4 * kPi * kPi * g.spacing() * g.spacing());
}

TEST_CASE("single spike second difference") {
  PeriodicGrid g(1, 64);
  ScalarField u(g);
  const double h = g.spacing();
  u[10] = h * h;
  const auto hess = discrete_hessian(QuasiPeriodicConvex(u));
  CHECK(hess[10].xx - 1.0 == -2.0);
  CHECK(hess[9].xx - 1.0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hess[11].xx - 1.0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("monge-ampere of the quadratic is uniform and smooth fields have unit mass") {
  PeriodicGrid g(2, 32);
  const auto ma = monge_ampere(QuasiPeriodicConvex::quadratic(g));
  for (double m : ma.mass) CHECK(m == doctest::Approx(1.0 / 1024));
  CHECK(ma.total() == doctest::Approx(1.0));
  // 1D: the second differences telescope, so the mass is exact
  PeriodicGrid g1(1, 64);
  CHECK(std::abs(monge_ampere(QuasiPeriodicConvex(oracle::random_convex_part(g1, 7, 0.5))).total() - 1.0) <= 1e-12);
  // 2D: 1 + O(h^2), checked through the ratio of errors on N and 2N
  auto err = [](int n) {
    PeriodicGrid gn(2, n);
    return std::abs(monge_ampere(QuasiPeriodicConvex(oracle::random_convex_part(gn, 7, 0.5))).total() - 1.0);
  };
  CHECK(err(32) / err(64) > 3.5);
  CHECK(err(32) / err(64) < 4.5);
}

TEST_CASE("monge-ampere vanishes on an affine hull bridge") {
  PeriodicGrid g(1, 64);
  const ScalarField f = ScalarField::sample(g, [](double x) { return 0.5 * std::cos(2 * kPi * x); });
  const QuasiPeriodicConvex env = convexify(f);
  const auto ma = monge_ampere(env);
  // the bridge spans x = 0 where the cosine is maximal
  CHECK(std::abs(ma.mass[0]) <= 1e-12);
  CHECK(std::abs(ma.mass[1]) <= 1e-12);
  CHECK(ma.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(monge_ampere(QuasiPeriodicConvex(f)), NonConvexInput);
}

TEST_CASE("trace norm") {
  PeriodicGrid g1(1, 256), g2(2, 16);
  CHECK(trace_norm(discrete_hessian(QuasiPeriodicConvex::quadratic(g2))) == 2.0);
  const auto phi = QuasiPeriodicConvex(ScalarField::sample(g1, [](double x) { return 0.1 * std::cos(2 * kPi * x); }));
  CHECK(std::abs(trace_norm(discrete_hessian(phi)) - (1 + 0.4 * kPi * kPi)) <= 1e-3);
}

TEST_CASE("field csv round trip is bit exact") {
  PeriodicGrid g(2, 8);
  const ScalarField f = oracle::random_convex_part(g, 3, 0.3);
  std::stringstream ss;
  write_field_csv(ss, f);
  const ScalarField back = read_field_csv(ss);
  CHECK(back.grid() == g);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == f[k]);
}

TEST_CASE("lft of the quadratic is the quadratic") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, 32);
    const auto dual = lft(QuasiPeriodicConvex::quadratic(g)).dual.periodic();
    CHECK(dual.max() <= 1e-14);
    CHECK(dual.min() >= -1e-14);
  }
}

TEST_CASE("lft matches the brute-force transform") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PeriodicGrid g1(1, 64);
    const QuasiPeriodicConvex p1(oracle::random_convex_part(g1, seed, 0.9));
    CHECK(oracle::sup_abs(lft(p1).dual.periodic(), oracle::brute_lft(p1)) <= 1e-12);
    PeriodicGrid g2(2, 12);
    const QuasiPeriodicConvex p2(oracle::random_convex_part(g2, seed, 0.9));
    CHECK(oracle::sup_abs(lft(p2).dual.periodic(), oracle::brute_lft(p2)) <= 1e-12);
  }
}

TEST_CASE("lft shift rule and biconjugate") {
  PeriodicGrid g(1, 256);
  const ScalarField u = ScalarField::sample(g, [](double x) { return 1e-3 * std::cos(2 * kPi * x); });
  const auto d0 = lft(QuasiPeriodicConvex(u)).dual.periodic();
  const auto d1 = lft(QuasiPeriodicConvex(u + 0.75)).dual.periodic();
  CHECK(oracle::sup_abs(d1 + 0.75, d0) <= 1e-14);
  const auto bi = lft(lft(QuasiPeriodicConvex(u)).dual).dual.periodic();
  CHECK(oracle::sup_abs(bi, u) <= 5 * g.spacing() * 2 * kPi * 1e-3);
}

TEST_CASE("isometry defect") {
  PeriodicGrid g(1, 256);
  const QuasiPeriodicConvex a(ScalarField::sample(g, [](double x) { return 0.01 * std::cos(2 * kPi * x); }));
  const QuasiPeriodicConvex b(ScalarField::sample(g, [](double x) { return 0.015 * std::sin(4 * kPi * x); }));
  CHECK(isometry_defect(a, a) == 0.0);
  CHECK(isometry_defect(a, QuasiPeriodicConvex(a.periodic() + 0.3)) <= 1e-14);
  CHECK(isometry_defect(a, b) <= 2 * g.spacing());
}

TEST_CASE("convexify equals the monotone chain hull") {
  PeriodicGrid g(1, 256);
  const ScalarField f = ScalarField::sample(g, [](double x) { return std::cos(2 * kPi * x); });
  CHECK(oracle::sup_abs(convexify(f).periodic(), oracle::monotone_chain_envelope(f)) <= 1e-9);
  const ScalarField wells = ScalarField::sample(g, [](double x) { return 0.3 * std::cos(4 * kPi * x) + 0.1 * std::sin(2 * kPi * x); });
  CHECK(oracle::sup_abs(convexify(wells).periodic(), oracle::monotone_chain_envelope(wells)) <= 1e-9);
}

TEST_CASE("convexify fixes convex inputs") {
  PeriodicGrid g1(1, 128), g2(2, 32);
  const ScalarField u1 = oracle::random_convex_part(g1, 11, 0.5);
  CHECK(oracle::sup_abs(convexify(u1).periodic(), u1) <= 1e-12);
  const ScalarField u2 = oracle::random_convex_part(g2, 11, 0.5);
  CHECK(oracle::sup_abs(convexify(u2).periodic(), u2) <= g2.spacing());
}
TEST_SUITE_END();
