#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "rshock/envelope.hpp"
#include "rshock/flow.hpp"
#include "rshock/hj.hpp"

using namespace rshock;
using oracle::kPi;

TEST_SUITE_BEGIN("flow");

namespace {
ScalarField cosine(const PeriodicGrid& g, double a) {
  if (g.dim() == 1) return ScalarField::sample(g, [a](double x) { return a * std::cos(2 * kPi * x); });
  return ScalarField::sample(g, [a](double x, double y) { return a * (std::cos(2 * kPi * x) + std::cos(2 * kPi * y)); });
}

FlowConfig config(double dt) {
  FlowConfig c;
  c.dt_initial = dt;
  return c;
}
}  // namespace

TEST_CASE("flow config validation") {
  FlowConfig c;
  c.dt_initial = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = FlowConfig{};
  c.dt_min = 1.0;
  c.dt_initial = 0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("the quadratic is stationary for H = 0") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, 16);
    FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), 10.0);
    s = integrate_nonnormalized(std::move(s), ScalarField(g), config(0.1), 1.0);
    CHECK(s.t == doctest::Approx(1.0));
    CHECK(oracle::sup_abs(s.phi.periodic(), ScalarField(g)) <= 1e-14);
  }
}

TEST_CASE("initial state must be strictly convex") {
  PeriodicGrid g(1, 64);
  CHECK_THROWS_AS(FlowState::initial(QuasiPeriodicConvex(cosine(g, 1.0)), 10.0), NonConvexState);
}

TEST_CASE("before the first shock the large-beta flow follows phi0 + tH") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, dim == 1 ? 256 : 32);
    const ScalarField H = cosine(g, 1.0);
    const double beta = 1e4;
    FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), beta);
    s = integrate_nonnormalized(std::move(s), H, config(1e-3), 0.02);
    CHECK(oracle::sup_abs(s.phi.periodic(), 0.02 * H) <= 10.0 / beta);
  }
}

TEST_CASE("Hessian trace bound on the small cosine") {
  PeriodicGrid g(1, 256);
  const ScalarField H = cosine(g, 0.1);
  double worst = 0.0;
  FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), 100.0);
  integrate_nonnormalized(std::move(s), H, config(0.01), 1.0, [&](const FlowState& st) {
    worst = std::max(worst, st.max_hess_trace / ((st.t + 1.0) * std::max(1.0, 0.4 * kPi * kPi)));
  });
  CHECK(worst <= 1.0 + 1e-3);
}

TEST_CASE("explicit and semi-implicit schemes agree") {
  PeriodicGrid g(1, 64);
  const ScalarField H = cosine(g, 0.02);
  FlowConfig ex = config(1e-3);
  ex.scheme = Scheme::explicit_adaptive;
  const FlowState a = integrate_nonnormalized(FlowState::initial(QuasiPeriodicConvex::quadratic(g), 5.0), H, ex, 0.1);
  const FlowState b =
      integrate_nonnormalized(FlowState::initial(QuasiPeriodicConvex::quadratic(g), 5.0), H, config(1e-4), 0.1);
  CHECK(oracle::sup_abs(a.phi.periodic(), b.phi.periodic()) <= 1e-4);
}

TEST_CASE("2D flow keeps convexity past the shock time") {
  PeriodicGrid g(2, 24);
  const ScalarField H = cosine(g, 0.5);
  FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), 10.0);
  s = integrate_nonnormalized(std::move(s), H, config(0.01), 0.5);
  CHECK(s.min_hess_eig > 0.0);
  CHECK(is_discretely_convex(s.phi));
  CHECK(monge_ampere(s.phi).total() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("2D flow reports a typed failure when the centered scheme degenerates") {
  // at beta = 50 the Hessian at the maximum of H collapses shortly after T*
  PeriodicGrid g(2, 24);
  FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), 50.0);
  FlowConfig c = config(0.01);
  c.dt_min = 1e-6;
  CHECK_THROWS_AS(integrate_nonnormalized(std::move(s), cosine(g, 0.5), c, 0.5), Error);
}

TEST_CASE("normalized flow: fixed point, decay of the speed and the envelope limit") {
  PeriodicGrid g(1, 256);
  const MongeAmpereMeasure dv = MongeAmpereMeasure::uniform(g);
  {
    FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), 100.0);
    s = integrate_normalized(std::move(s), ScalarField(g), dv, config(0.1), 1.0);
    CHECK(oracle::sup_abs(s.phi.periodic(), ScalarField(g)) <= 1e-14);
  }
  const ScalarField f = cosine(g, 1.0);
  const double beta = 1e3;
  double rate1 = 0.0, rate2 = 0.0;
  FlowState s = FlowState::initial(QuasiPeriodicConvex::quadratic(g), beta);
  s = integrate_normalized(std::move(s), f, dv, config(0.01), 2.0, [&](const FlowState& st) {
    if (std::abs(st.t - 1.0) < 1e-9) rate1 = st.last_rate;
    if (std::abs(st.t - 2.0) < 1e-9) rate2 = st.last_rate;
  });
  REQUIRE(rate1 > 0.0);
  CHECK(rate2 <= std::exp(-1.0) * rate1 * 1.2);
  const auto target = project_convex(QuasiPeriodicConvex::quadratic(g), f, -std::expm1(-2.0));
  CHECK(sup_distance(s.phi.periodic(), target.projected) <= 2.0 * std::log(beta) / beta);
}

TEST_CASE("viscous HJ: maximum principle for H = 0") {
  PeriodicGrid g(1, 64);
  ScalarField psi = ScalarField::sample(g, [](double x) { return std::abs(x - 0.5); });
  const PeriodicHamiltonian h0{ScalarField(g)};
  double prev = psi.max();
  for (int k = 0; k < 50; ++k) {
    psi = step_linear_viscosity(psi, h0, 10.0, 0.9 * g.spacing() * g.spacing() * 10.0 / 2.0);
    CHECK(psi.max() <= prev + 1e-15);
    prev = psi.max();
  }
}

TEST_CASE("viscous HJ: mean changes only through the numerical Hamiltonian") {
  for (int dim : {1, 2}) {
    PeriodicGrid g(dim, 32);
    const QuadraticHamiltonian H;
    ScalarField psi = cosine(g, 0.1);
    const double dt = 0.4 * g.spacing() * g.spacing() * 20.0 / (2 * dim);
    for (int k = 0; k < 20; ++k) {
      const double predicted = psi.mean() - dt * mean_numerical_hamiltonian(psi, H);
      psi = step_linear_viscosity(psi, H, 20.0, dt);
      CHECK(std::abs(psi.mean() - predicted) <= 1e-10);
    }
    CHECK_THROWS_AS(step_linear_viscosity(psi, H, 20.0, 1.0), CflViolation);
  }
}

TEST_CASE("viscous HJ converges to Hopf-Lax as beta grows") {
  PeriodicGrid g(1, 128);
  const ScalarField psi0 = ScalarField::sample(g, [](double x) { return std::min(x, 1.0 - x); });
  const double t = 0.25;
  const ScalarField exact = hopf_lax(psi0, 0.0, quadratic_conjugate, t).psi;
  const QuadraticHamiltonian H;
  double prev_err = 1e9;
  for (double beta : {1e2, 1e3}) {
    ScalarField psi = psi0;
    const double dt = std::min(0.4 * g.spacing(), 0.4 * g.spacing() * g.spacing() * beta / 2.0);
    const int steps = int(std::ceil(t / dt));
    for (int k = 0; k < steps; ++k) psi = step_linear_viscosity(psi, H, beta, t / steps);
    const double err = sup_distance(psi, exact);
    CHECK(err <= 1.0 / std::sqrt(beta));
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("log diffusion conserves the mass balance") {
  PeriodicGrid g(2, 16);
  const ScalarField rho0 = ScalarField::constant(g, 1.0);
  const double dt = 0.05;
  FlowConfig c = config(dt);
  const ScalarField rho1 = step_log_diffusion_2d(rho0, rho0, 100.0, c);
  double m = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) m += rho1[k] * g.spacing() * g.spacing();
  CHECK(std::abs(m - (1.0 + dt)) <= 1e-10);

  const ScalarField bump = ScalarField::sample(g, [](double x, double y) { return 1.0 + 0.5 * std::sin(2 * kPi * x) * std::cos(2 * kPi * y); });
  const ScalarField source = ScalarField::sample(g, [](double x, double) { return 0.3 + 0.2 * std::cos(2 * kPi * x); });
  LogDiffusionState s = LogDiffusionState::from_density(bump);
  const double m0 = s.mass();
  s = integrate_log_diffusion_2d(std::move(s), source, 10.0, c, 0.5);
  CHECK(std::abs(s.mass() - (m0 + 0.5 * 0.3)) <= 1e-10);
  CHECK(s.density().min() > 0.0);

  LogDiffusionState still = LogDiffusionState::from_density(bump);
  still = integrate_log_diffusion_2d(std::move(still), ScalarField(g), 1e6, c, 0.5);
  CHECK(oracle::sup_abs(still.density(), bump) <= 1e-4);

  ScalarField bad = rho0;
  bad[3] = 0.0;
  CHECK_THROWS_AS(step_log_diffusion_2d(bad, rho0, 100.0, c), PositivityLoss);
}

TEST_CASE("reparametrization round trips") {
  for (double t : {0.0, 0.3, 2.0}) CHECK(reparametrize::t_from_s(reparametrize::s_from_t(t)) == doctest::Approx(t));
  CHECK(reparametrize::c_beta(0.0, 10.0, 1) == 0.0);
  CHECK(reparametrize::c_beta(1.0, 10.0, 2) == doctest::Approx(0.2 * std::exp(-1.0)));
  PeriodicGrid g(1, 32);
  const ScalarField u = cosine(g, 0.3);
  const ScalarField back = reparametrize::normalized_from_nonnormalized(
      reparametrize::nonnormalized_from_normalized(u, 0.7, 50.0), reparametrize::s_from_t(0.7), 50.0);
  CHECK(oracle::sup_abs(u, back) <= 1e-14);
}

TEST_SUITE_END();
