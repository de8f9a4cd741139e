#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "rshock/energy.hpp"
#include "rshock/envelope.hpp"

using namespace rshock;
using oracle::kPi;

TEST_SUITE_BEGIN("energy");

TEST_CASE("Aubin-Mabuchi normalization") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, 16);
    CHECK(aubin_mabuchi(QuasiPeriodicConvex::quadratic(g)) == 0.0);
    CHECK(aubin_mabuchi(QuasiPeriodicConvex(ScalarField::constant(g, 0.7))) == doctest::Approx(0.7).epsilon(1e-13));
  }
}

TEST_CASE("first variation of E is the Monge-Ampere measure") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, dim == 1 ? 256 : 32);
    const QuasiPeriodicConvex phi(oracle::random_convex_part(g, 3, 0.6));
    const ScalarField v = oracle::random_convex_part(g, 4, 1.0);
    const double s = 1e-5;
    const double fd = (aubin_mabuchi(QuasiPeriodicConvex(phi.periodic() + s * v)) -
                       aubin_mabuchi(QuasiPeriodicConvex(phi.periodic() + (-s) * v))) / (2 * s);
    const auto ma = signed_monge_ampere(phi);
    double pair = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) pair += v[k] * ma.mass[k];
    CHECK(std::abs(fd - pair) <= 1e-6);
  }
}

TEST_CASE("E_theta vanishes at the origin and ignores constant shifts") {
  PeriodicGrid g(1, 128);
  CHECK(e_theta(QuasiPeriodicConvex::quadratic(g), ScalarField(g)) == 0.0);
  const ScalarField f = ScalarField::sample(g, [](double x) { return std::cos(2 * kPi * x); });
  const QuasiPeriodicConvex phi(oracle::random_convex_part(g, 1, 0.5));
  CHECK(std::abs(e_theta(phi, f) - e_theta(QuasiPeriodicConvex(phi.periodic() + 3.0), f)) <= 1e-10);
}

TEST_CASE("E_theta decreases along the envelope curve") {
  PeriodicGrid g(1, 256);
  const ScalarField f = ScalarField::sample(g, [](double x) { return std::cos(2 * kPi * x); });
  double prev = 1e300;
  for (int k = 0; k <= 20; ++k) {
    const double t = 0.1 * k;
    const double e = e_theta(project_convex(QuasiPeriodicConvex::quadratic(g), f, -std::expm1(-t)).as_convex(), f);
    CHECK(e <= prev + 1e-8);
    prev = e;
  }
}

TEST_CASE("I functional") {
  PeriodicGrid g(1, 128);
  const QuasiPeriodicConvex u(oracle::random_convex_part(g, 1, 0.5));
  CHECK(i_functional(u, u) == 0.0);
  CHECK(std::abs(i_functional(u, QuasiPeriodicConvex(u.periodic() + 2.0))) <= 1e-12);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (int dim : {1, 2}) {
      PeriodicGrid gd(dim, 16);
      const QuasiPeriodicConvex a(oracle::random_convex_part(gd, 2 * seed, 0.8));
      const QuasiPeriodicConvex b(oracle::random_convex_part(gd, 2 * seed + 1, 0.8));
      CHECK(i_functional(a, b) == i_functional(b, a));
      CHECK(i_functional(a, b) >= -1e-10);
    }
  }
}

TEST_CASE("strict decrease inequality between envelopes") {
  PeriodicGrid g(1, 256);
  const ScalarField f = ScalarField::sample(g, [](double x) { return std::cos(2 * kPi * x); });
  auto env = [&](double t) { return project_convex(QuasiPeriodicConvex::quadratic(g), f, -std::expm1(-t)).as_convex(); };
  const auto a = env(0.5), b = env(1.0);
  CHECK(i_functional(b, a) > 0.0);
  CHECK(e_theta(b, f) - e_theta(a, f) <= -i_functional(b, a) / std::expm1(0.5) + 1e-8);
}

TEST_CASE("relative entropy") {
  PeriodicGrid g(1, 64);
  const auto mu0 = MongeAmpereMeasure::uniform(g);
  CHECK(entropy(mu0, mu0) == 0.0);
  const auto mu = signed_monge_ampere(QuasiPeriodicConvex(oracle::random_convex_part(g, 8, 0.7)));
  CHECK(entropy(mu, mu0) >= -1e-10);
  MongeAmpereMeasure zero0 = mu0;
  zero0.mass[3] = 0.0;
  CHECK(std::isinf(entropy(mu, zero0)));
  const auto r = energy_report(0.0, QuasiPeriodicConvex::quadratic(g), mu0, ScalarField(g), mu0, 10.0);
  CHECK(r.F_beta == 0.0);
  CHECK(std::isnan(r.I_vs_prev));
}

TEST_SUITE_END();
