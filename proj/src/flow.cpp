#include "rshock/flow.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "rshock/envelope.hpp"
#include "rshock/field_io.hpp"
#include "sparse_ops.hpp"

namespace rshock {

void FlowConfig::validate() const {
  if (!(dt_min > 0.0)) throw InvalidArgument("FlowConfig: dt_min must be positive");
  if (!(dt_initial >= dt_min)) throw InvalidArgument("FlowConfig: dt_initial must be >= dt_min");
  if (!(delta_min > 0.0 && delta_min <= 1e-6)) throw InvalidArgument("FlowConfig: delta_min must lie in (0, 1e-6]");
  if (!(newton_tol > 0.0) || newton_max_iters < 1) throw InvalidArgument("FlowConfig: bad Newton settings");
  if (max_halvings < 0) throw InvalidArgument("FlowConfig: max_halvings must be >= 0");
}

namespace {

double cell_volume(const PeriodicGrid& g) { return g.dim() == 1 ? g.spacing() : g.spacing() * g.spacing(); }

/// Hessian of phi in the class (1 + rate t) Id.
HessianField class_hessian(const QuasiPeriodicConvex& phi, double shift) {
  const HessianField base = discrete_hessian(phi);
  std::vector<Sym2> nodes(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) {
    nodes[k] = base[k];
    nodes[k].xx += shift;
    nodes[k].yy += shift;
  }
  return HessianField(phi.grid(), std::move(nodes));
}

void fill_diagnostics(FlowState& s, double delta_min, bool count_clamps) {
  const PeriodicGrid& g = s.phi.grid();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  long clamps = 0;
  if (s.log_hessian) {
    for (double w : s.log_hessian->values()) {
      const double a = std::exp(w);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      if (a < delta_min) ++clamps;
    }
  } else {
    const HessianField hess = class_hessian(s.phi, s.class_rate * s.t);
    for (std::size_t k = 0; k < g.size(); ++k) {
      lo = std::min(lo, hess.min_eig(k));
      hi = std::max(hi, hess.trace(k));
      if (hess.det(k) < delta_min) ++clamps;
    }
  }
  s.min_hess_eig = lo;
  s.max_hess_trace = hi;
  if (count_clamps) s.clamp_events += clamps;
}

/// Common form of both Monge-Ampere flows:
///   du/dt = (log det(c(t) Id + D^2 u) - ell) / beta - kappa u + F,  c(t) = 1 + chi t.
/// Non-normalized: ell = 0, kappa = 0, F = H. Normalized: chi = 0, kappa = 1,
/// ell = log of the reference density, F = f.
struct FlowTerms {
  const ScalarField& forcing;
  const ScalarField* log_ref = nullptr;
  double chi = 0.0;
  double kappa = 0.0;
};

enum class Failure { none, newton, convexity };

struct Attempt {
  std::optional<FlowState> state;
  Failure failure = Failure::none;
};

double ell_at(const FlowTerms& terms, std::size_t k) { return terms.log_ref ? (*terms.log_ref)[k] : 0.0; }

/// Backward Euler in the log-density variable (1D).
///
/// With a = c(t) + u'' and w = log a the update u+ = (u + dt((w+ - ell)/beta + F)) / (1 + kappa dt)
/// turns into k e^{w+} - (dt/beta) D2 w+ = r, solved by Newton; a stays positive by construction.
Attempt implicit_1d(const FlowState& s, const FlowTerms& terms, double dt, const FlowConfig& cfg) {
  const PeriodicGrid& g = s.phi.grid();
  const ScalarField w0 = s.log_hessian ? *s.log_hessian : [&] {
    const HessianField hess = class_hessian(s.phi, terms.chi * s.t);
    ScalarField w(g);
    for (std::size_t k = 0; k < g.size(); ++k) w[k] = std::log(hess[k].xx);
    return w;
  }();
  const double k = 1.0 + terms.kappa * dt;
  const double c = dt / s.beta;
  const ScalarField d2f = laplacian(terms.forcing);
  const std::optional<ScalarField> d2l =
      terms.log_ref ? std::optional<ScalarField>(laplacian(*terms.log_ref)) : std::nullopt;

  const double base = k * (1.0 + terms.chi * (s.t + dt)) - 1.0 - terms.chi * s.t;
  detail::Vector r(Eigen::Index(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = base + std::exp(w0[i]) + dt * d2f[i];
    if (d2l) v -= c * (*d2l)[i];
    r[Eigen::Index(i)] = v;
  }
  detail::Vector w = detail::to_vector(w0);
  const detail::SparseMatrix L = detail::negative_laplacian(g);
  if (!detail::solve_exp_diffusion(L, k, c, r, w, cfg.newton_tol, cfg.newton_max_iters)) return {std::nullopt, Failure::newton};

  FlowState out = s;
  out.t = s.t + dt;
  out.last_dt = dt;
  ScalarField& u = out.phi.periodic();
  double rate = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double next =
        (s.phi.periodic()[i] + dt * ((w[Eigen::Index(i)] - ell_at(terms, i)) / s.beta + terms.forcing[i])) / k;
    rate = std::max(rate, std::abs(next - s.phi.periodic()[i]) / dt);
    u[i] = next;
  }
  out.last_rate = rate;
  out.log_hessian = detail::to_field(g, w);
  fill_diagnostics(out, cfg.delta_min, true);
  return {std::move(out), Failure::none};
}

/// Newton on the potential for the full 2x2 determinant (2D).
Attempt implicit_2d(const FlowState& s, const FlowTerms& terms, double dt, const FlowConfig& cfg) {
  const PeriodicGrid& g = s.phi.grid();
  const int n = g.n();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const double shift = terms.chi * (s.t + dt);
  const double k = 1.0 + terms.kappa * dt;
  const double c = dt / s.beta;
  const ScalarField& u0 = s.phi.periodic();

  auto residual = [&](const ScalarField& u, detail::Vector& F, long& clamps) {
    const HessianField hess = class_hessian(QuasiPeriodicConvex(u), shift);
    clamps = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double det = hess.det(i);
      if (det < cfg.delta_min) {
        det = cfg.delta_min;
        ++clamps;
      }
      F[Eigen::Index(i)] = k * u[i] - u0[i] - dt * ((std::log(det) - ell_at(terms, i)) / s.beta + terms.forcing[i]);
    }
    return hess;
  };

  ScalarField u = u0;
  detail::Vector F(Eigen::Index(g.size()));
  long clamps = 0;
  HessianField hess = residual(u, F, clamps);
  const double scale = std::max(1.0, u0.max() - u0.min());
  // Rounding in u perturbs each Hessian entry by ~ 4 eps |u| / h^2, which moves
  // log det by tr(A^{-1}) times that; nodes with tiny eigenvalues cannot be
  // resolved below this floor.
  auto small_enough = [&](const detail::Vector& Fv, const HessianField& hv, const ScalarField& uv) {
    if (!Fv.allFinite()) return false;
    const double entry_noise = 4.0 * std::numeric_limits<double>::epsilon() *
                               (1.0 + std::max(std::abs(uv.max()), std::abs(uv.min()))) * inv_h2;
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double det = std::max(hv.det(m), cfg.delta_min);
      const double floor = c * 16.0 * entry_noise * hv.trace(m) / det;
      if (std::abs(Fv[Eigen::Index(m)]) > cfg.newton_tol * scale + floor) return false;
    }
    return true;
  };
  Eigen::SparseLU<detail::SparseMatrix> solver;
  bool converged = false;
  for (int it = 0; it < cfg.newton_max_iters; ++it) {
    if (!F.allFinite()) return {std::nullopt, Failure::newton};
    if (small_enough(F, hess, u)) {
      converged = true;
      break;
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(10 * g.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int r = int(g.index(i, j));
        trips.emplace_back(r, r, k);
        const double det = hess.det(std::size_t(r));
        if (det < cfg.delta_min) continue;
        const Sym2& a = hess[std::size_t(r)];
        const double f = -c / det * inv_h2;
        // cof(A) : D^2 = a_yy Dxx + a_xx Dyy - 2 a_xy Dxy
        trips.emplace_back(r, int(g.index(i + 1, j)), f * a.yy);
        trips.emplace_back(r, int(g.index(i - 1, j)), f * a.yy);
        trips.emplace_back(r, int(g.index(i, j + 1)), f * a.xx);
        trips.emplace_back(r, int(g.index(i, j - 1)), f * a.xx);
        trips.emplace_back(r, r, -2.0 * f * (a.xx + a.yy));
        const double cross = -2.0 * a.xy * 0.25 * f;
        trips.emplace_back(r, int(g.index(i + 1, j + 1)), cross);
        trips.emplace_back(r, int(g.index(i - 1, j - 1)), cross);
        trips.emplace_back(r, int(g.index(i + 1, j - 1)), -cross);
        trips.emplace_back(r, int(g.index(i - 1, j + 1)), -cross);
      }
    detail::SparseMatrix J(Eigen::Index(g.size()), Eigen::Index(g.size()));
    J.setFromTriplets(trips.begin(), trips.end());
    solver.compute(J);
    if (solver.info() != Eigen::Success) return {std::nullopt, Failure::newton};
    const detail::Vector delta = solver.solve(-F);
    if (!delta.allFinite()) return {std::nullopt, Failure::newton};

    const double f0 = F.squaredNorm();
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      ScalarField trial = u;
      for (std::size_t m = 0; m < g.size(); ++m) trial[m] += alpha * delta[Eigen::Index(m)];
      detail::Vector Ft(F.size());
      long ct = 0;
      HessianField ht = residual(trial, Ft, ct);
      // det > 0 alone admits the concave branch; stay inside the convex cone
      bool inside = true;
      for (std::size_t m = 0; m < g.size() && inside; ++m) inside = ht.min_eig(m) > 0.0;
      if (inside && Ft.allFinite() && Ft.squaredNorm() <= (1.0 - 1e-4 * alpha) * f0) {
        u = std::move(trial);
        F = std::move(Ft);
        hess = std::move(ht);
        clamps = ct;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  if (!converged && !small_enough(F, hess, u)) return {std::nullopt, Failure::newton};

  for (std::size_t m = 0; m < g.size(); ++m)
    if (hess.min_eig(m) < cfg.delta_min) return {std::nullopt, Failure::convexity};

  FlowState out = s;
  out.t = s.t + dt;
  out.last_dt = dt;
  double rate = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) rate = std::max(rate, std::abs(u[m] - u0[m]) / dt);
  out.last_rate = rate;
  out.phi = QuasiPeriodicConvex(std::move(u));
  out.log_hessian.reset();
  fill_diagnostics(out, cfg.delta_min, false);
  out.clamp_events = s.clamp_events + clamps;
  return {std::move(out), Failure::none};
}

/// Forward Euler with dt <= 0.4 beta h^2 min eig, log det clamped at delta_min.
Attempt explicit_step(const FlowState& s, const FlowTerms& terms, double dt, const FlowConfig& cfg) {
  const PeriodicGrid& g = s.phi.grid();
  const HessianField hess = class_hessian(s.phi, terms.chi * s.t);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < g.size(); ++m) lo = std::min(lo, hess.min_eig(m));
  const double h = g.spacing();
  dt = std::min(dt, 0.4 * s.beta * h * h * std::max(lo, cfg.delta_min));

  FlowState out = s;
  ScalarField& u = out.phi.periodic();
  long clamps = 0;
  double rate = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    double det = hess.det(m);
    if (det < cfg.delta_min) {
      det = cfg.delta_min;
      ++clamps;
    }
    const double du =
        (std::log(det) - ell_at(terms, m)) / s.beta - terms.kappa * s.phi.periodic()[m] + terms.forcing[m];
    rate = std::max(rate, std::abs(du));
    u[m] += dt * du;
  }
  out.t = s.t + dt;
  out.last_dt = dt;
  out.last_rate = rate;
  const HessianField next = class_hessian(out.phi, terms.chi * out.t);
  for (std::size_t m = 0; m < g.size(); ++m)
    if (next.min_eig(m) < cfg.delta_min) return {std::nullopt, Failure::convexity};
  if (g.dim() == 1) {
    ScalarField w(g);
    for (std::size_t m = 0; m < g.size(); ++m) w[m] = std::log(next[m].xx);
    out.log_hessian = std::move(w);
  } else {
    out.log_hessian.reset();
  }
  fill_diagnostics(out, cfg.delta_min, false);
  out.clamp_events = s.clamp_events + clamps;
  return {std::move(out), Failure::none};
}

FlowState advance(const FlowState& state, const FlowTerms& terms, const FlowConfig& cfg) {
  cfg.validate();
  if (!(terms.forcing.grid() == state.phi.grid())) throw InvalidArgument("flow step: grid mismatch");
  double dt = cfg.dt_initial;
  bool all_convexity = true;
  for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
    if (dt < cfg.dt_min) break;
    Attempt a;
    if (cfg.scheme == Scheme::explicit_adaptive)
      a = explicit_step(state, terms, dt, cfg);
    else if (state.phi.grid().dim() == 1)
      a = implicit_1d(state, terms, dt, cfg);
    else
      a = implicit_2d(state, terms, dt, cfg);
    if (a.state) return std::move(*a.state);
    if (a.failure != Failure::convexity) all_convexity = false;
    dt *= 0.5;
  }
  if (all_convexity) throw NonConvexState("flow step: convexity could not be restored above delta_min");
  throw StepUnderflow("flow step: time step fell below dt_min at t = " + format_real(state.t));
}

template <class Step>
FlowState integrate(FlowState state, const FlowConfig& cfg, double t_end, const FlowObserver& observer, Step step) {
  const double eps = 1e-13 * std::max(1.0, std::abs(t_end));
  double dt = cfg.dt_initial;
  while (state.t < t_end - eps) {
    FlowConfig local = cfg;
    local.dt_initial = std::min(dt, t_end - state.t);
    if (local.dt_initial < local.dt_min) local.dt_min = local.dt_initial;
    state = step(state, local);
    if (observer) observer(state);
    // grow back towards the configured step after a rejection
    dt = std::min(cfg.dt_initial, 2.0 * std::max(state.last_dt, cfg.dt_min));
  }
  return state;
}

}  // namespace

FlowState FlowState::initial(QuasiPeriodicConvex phi, double beta, double t0, double class_rate) {
  if (!(beta > 0.0)) throw InvalidArgument("FlowState: beta must be positive");
  if (t0 < 0.0) throw InvalidArgument("FlowState: t must be nonnegative");
  FlowState s{t0, beta, std::move(phi), class_rate};
  const HessianField hess = class_hessian(s.phi, class_rate * t0);
  for (std::size_t k = 0; k < hess.size(); ++k)
    if (!(hess.min_eig(k) > 0.0)) throw NonConvexState("FlowState: initial potential is not strictly convex");
  if (s.phi.grid().dim() == 1) {
    ScalarField w(s.phi.grid());
    for (std::size_t k = 0; k < hess.size(); ++k) w[k] = std::log(hess[k].xx);
    s.log_hessian = std::move(w);
  }
  fill_diagnostics(s, 1e-12, false);
  return s;
}

MongeAmpereMeasure FlowState::measure() const {
  const PeriodicGrid& g = phi.grid();
  const double cell = cell_volume(g);
  std::vector<double> mass(g.size());
  if (log_hessian) {
    for (std::size_t k = 0; k < g.size(); ++k) mass[k] = std::exp((*log_hessian)[k]) * cell;
  } else {
    const HessianField hess = class_hessian(phi, class_rate * t);
    for (std::size_t k = 0; k < g.size(); ++k) mass[k] = std::max(hess.det(k), 0.0) * cell;
  }
  return {g, std::move(mass)};
}

FlowState step_nonnormalized(const FlowState& state, const ScalarField& hamiltonian, const FlowConfig& cfg) {
  return advance(state, FlowTerms{hamiltonian, nullptr, state.class_rate, 0.0}, cfg);
}

namespace {

ScalarField log_reference(const MongeAmpereMeasure& dv) {
  ScalarField ell(dv.grid);
  for (std::size_t k = 0; k < dv.mass.size(); ++k) {
    const double d = dv.density(k);
    if (!(d > 0.0)) throw InvalidArgument("step_normalized: reference measure must have positive density");
    ell[k] = std::log(d);
  }
  return ell;
}

}  // namespace

FlowState step_normalized(const FlowState& state, const ScalarField& f, const MongeAmpereMeasure& dv,
                          const FlowConfig& cfg) {
  if (state.class_rate != 0.0) throw InvalidArgument("step_normalized: the normalized flow uses a fixed class");
  const ScalarField ell = log_reference(dv);
  return advance(state, FlowTerms{f, &ell, 0.0, 1.0}, cfg);
}

FlowState integrate_nonnormalized(FlowState state, const ScalarField& hamiltonian, const FlowConfig& cfg,
                                  double t_end, const FlowObserver& observer) {
  return integrate(std::move(state), cfg, t_end, observer,
                   [&](const FlowState& s, const FlowConfig& c) { return step_nonnormalized(s, hamiltonian, c); });
}

FlowState integrate_normalized(FlowState state, const ScalarField& f, const MongeAmpereMeasure& dv,
                               const FlowConfig& cfg, double t_end, const FlowObserver& observer) {
  if (state.class_rate != 0.0) throw InvalidArgument("integrate_normalized: the normalized flow uses a fixed class");
  const ScalarField ell = log_reference(dv);
  return integrate(std::move(state), cfg, t_end, observer, [&](const FlowState& s, const FlowConfig& c) {
    return advance(s, FlowTerms{f, &ell, 0.0, 1.0}, c);
  });
}

TrajectoryRow trajectory_row(const FlowState& s, double sup_err_vs_envelope) {
  return {s.t, s.beta, sup_err_vs_envelope, s.min_hess_eig, s.max_hess_trace, s.clamp_events, s.last_dt};
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path);
  out << "t,beta,sup_err_vs_envelope,min_hess_eig,max_hess_trace,clamp_events,dt\n";
  for (const TrajectoryRow& r : rows)
    out << format_real(r.t) << ',' << format_real(r.beta) << ',' << format_real(r.sup_err_vs_envelope) << ','
        << format_real(r.min_hess_eig) << ',' << format_real(r.max_hess_trace) << ',' << r.clamp_events << ','
        << format_real(r.dt) << '\n';
}

// ---------------------------------------------------------------------------
// Hamiltonians and the linear-viscosity solver

double QuadraticHamiltonian::value(std::span<const double> p) const {
  double s = 0.0;
  for (double x : p) s += x * x;
  return 0.5 * s;
}

double QuadraticHamiltonian::godunov(double pm, double pp) const {
  if (pm <= pp) {
    if (pm <= 0.0 && 0.0 <= pp) return 0.0;
    return 0.5 * std::min(pm * pm, pp * pp);
  }
  return 0.5 * std::max(pm * pm, pp * pp);
}

PeriodicHamiltonian::PeriodicHamiltonian(ScalarField h) : h_(std::move(h)), lipschitz_(0.0) {
  const PeriodicGrid& g = h_.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) lipschitz_ = std::max(lipschitz_, std::abs(h_.at(i + 1) - h_.at(i)) * inv_h);
  } else {
    double lx = 0.0, ly = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        lx = std::max(lx, std::abs(h_.at(i + 1, j) - h_.at(i, j)) * inv_h);
        ly = std::max(ly, std::abs(h_.at(i, j + 1) - h_.at(i, j)) * inv_h);
      }
    lipschitz_ = std::max(lx, ly);
  }
}

double PeriodicHamiltonian::value(std::span<const double> p) const {
  const PeriodicGrid& g = h_.grid();
  const double n = g.n();
  const double x = p[0] * n;
  const double fx = std::floor(x);
  const double ax = x - fx;
  const int i = int(std::fmod(fx, n));
  if (g.dim() == 1) return (1.0 - ax) * h_.at(i) + ax * h_.at(i + 1);
  const double y = p[1] * n;
  const double fy = std::floor(y);
  const double ay = y - fy;
  const int j = int(std::fmod(fy, n));
  return (1.0 - ax) * ((1.0 - ay) * h_.at(i, j) + ay * h_.at(i, j + 1)) +
         ax * ((1.0 - ay) * h_.at(i + 1, j) + ay * h_.at(i + 1, j + 1));
}

double PeriodicHamiltonian::godunov(double pm, double pp) const {
  if (h_.grid().dim() != 1) throw InvalidArgument("PeriodicHamiltonian::godunov is 1D only");
  const bool minimize = pm <= pp;
  const double lo = std::min(pm, pp), hi = std::max(pm, pp);
  const double v0 = value(std::span<const double>(&lo, 1));
  const double v1 = value(std::span<const double>(&hi, 1));
  double best = minimize ? std::min(v0, v1) : std::max(v0, v1);
  if (hi - lo >= 1.0) return minimize ? h_.min() : h_.max();
  // interior nodes of the piecewise-linear interpolant
  const double n = h_.grid().n();
  for (double k = std::floor(lo * n) + 1.0; k < hi * n; k += 1.0) {
    const double v = h_.at(int(std::fmod(std::fmod(k, n) + n, n)));
    best = minimize ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

double PeriodicHamiltonian::slope_bound(double) const { return lipschitz_; }

namespace {

/// Numerical Hamiltonian per node: Godunov in 1D, local Lax-Friedrichs in 2D.
ScalarField numerical_hamiltonian(const ScalarField& psi, const Hamiltonian& hamiltonian) {
  const PeriodicGrid& g = psi.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  ScalarField out(g);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double pm = (psi.at(i) - psi.at(i - 1)) * inv_h;
      const double pp = (psi.at(i + 1) - psi.at(i)) * inv_h;
      out[std::size_t(i)] = hamiltonian.godunov(pm, pp);
    }
    return out;
  }
  double pmax = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      pmax = std::max(pmax, std::abs(psi.at(i + 1, j) - psi.at(i, j)) * inv_h);
      pmax = std::max(pmax, std::abs(psi.at(i, j + 1) - psi.at(i, j)) * inv_h);
    }
  const double alpha = hamiltonian.slope_bound(pmax);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double c = psi.at(i, j);
      const double pxm = (c - psi.at(i - 1, j)) * inv_h, pxp = (psi.at(i + 1, j) - c) * inv_h;
      const double pym = (c - psi.at(i, j - 1)) * inv_h, pyp = (psi.at(i, j + 1) - c) * inv_h;
      const double p[2] = {0.5 * (pxm + pxp), 0.5 * (pym + pyp)};
      out[g.index(i, j)] = hamiltonian.value(p) - 0.5 * alpha * (pxp - pxm) - 0.5 * alpha * (pyp - pym);
    }
  return out;
}

}  // namespace

double mean_numerical_hamiltonian(const ScalarField& psi, const Hamiltonian& hamiltonian) {
  return numerical_hamiltonian(psi, hamiltonian).mean();
}

ScalarField step_linear_viscosity(const ScalarField& psi, const Hamiltonian& hamiltonian, double beta, double dt) {
  if (!(beta > 0.0) || !(dt > 0.0)) throw InvalidArgument("step_linear_viscosity: beta and dt must be positive");
  const PeriodicGrid& g = psi.grid();
  const double h = g.spacing();
  const double limit = 0.9 * h * h * beta / (2.0 * g.dim());
  if (dt > limit)
    throw CflViolation("step_linear_viscosity: dt = " + format_real(dt) + " exceeds " + format_real(limit));
  const ScalarField hnum = numerical_hamiltonian(psi, hamiltonian);
  const ScalarField lap = laplacian(psi);
  ScalarField out = psi;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += dt * (lap[k] / beta - hnum[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Logarithmic diffusion

LogDiffusionState LogDiffusionState::from_density(const ScalarField& rho, double t0) {
  ScalarField w(rho.grid());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (!(rho[k] > 0.0)) throw PositivityLoss("log diffusion: density must be positive");
    w[k] = std::log(rho[k]);
  }
  return {t0, std::move(w), 0.0};
}

ScalarField LogDiffusionState::density() const {
  ScalarField rho(log_rho.grid());
  for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = std::exp(log_rho[k]);
  return rho;
}

double LogDiffusionState::mass() const {
  double s = 0.0;
  for (double w : log_rho.values()) s += std::exp(w);
  return s * cell_volume(log_rho.grid());
}

LogDiffusionState step_log_diffusion_2d(const LogDiffusionState& state, const ScalarField& source, double beta,
                                        const FlowConfig& cfg) {
  cfg.validate();
  const PeriodicGrid& g = state.log_rho.grid();
  if (g.dim() != 2) throw InvalidArgument("step_log_diffusion_2d: 2D grid required");
  if (!(source.grid() == g)) throw InvalidArgument("step_log_diffusion_2d: grid mismatch");
  if (!(beta > 0.0)) throw InvalidArgument("step_log_diffusion_2d: beta must be positive");
  const detail::SparseMatrix L = detail::negative_laplacian(g);
  double dt = cfg.dt_initial;
  for (int halving = 0; halving <= cfg.max_halvings && dt >= cfg.dt_min; ++halving, dt *= 0.5) {
    detail::Vector r(Eigen::Index(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) r[Eigen::Index(k)] = std::exp(state.log_rho[k]) + dt * source[k];
    if (!(r.sum() > 0.0)) continue;
    detail::Vector w = detail::to_vector(state.log_rho);
    if (!detail::solve_exp_diffusion(L, 1.0, dt * kDdcScale / beta, r, w, cfg.newton_tol, cfg.newton_max_iters))
      continue;
    return {state.t + dt, detail::to_field(g, w), dt};
  }
  throw PositivityLoss("step_log_diffusion_2d: no positive solution down to dt_min");
}

ScalarField step_log_diffusion_2d(const ScalarField& rho, const ScalarField& source, double beta,
                                  const FlowConfig& cfg) {
  return step_log_diffusion_2d(LogDiffusionState::from_density(rho), source, beta, cfg).density();
}

LogDiffusionState integrate_log_diffusion_2d(LogDiffusionState state, const ScalarField& source, double beta,
                                             const FlowConfig& cfg, double t_end) {
  const double eps = 1e-13 * std::max(1.0, std::abs(t_end));
  while (state.t < t_end - eps) {
    FlowConfig local = cfg;
    local.dt_initial = std::min(cfg.dt_initial, t_end - state.t);
    if (local.dt_initial < local.dt_min) local.dt_min = local.dt_initial;
    state = step_log_diffusion_2d(state, source, beta, local);
  }
  return state;
}

namespace reparametrize {

double t_from_s(double s) {
  if (!(s > -1.0)) throw InvalidArgument("reparametrize: s must exceed -1");
  return std::log1p(s);
}

double s_from_t(double t) { return std::expm1(t); }

double c_beta(double t, double beta, int n) { return n / beta * (t - 1.0 + std::exp(-t)); }

ScalarField normalized_from_nonnormalized(const ScalarField& u_tilde, double s, double beta) {
  const double t = t_from_s(s);
  const double c = c_beta(t, beta, u_tilde.grid().dim());
  ScalarField out = u_tilde;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(-t) * u_tilde[k] - c;
  return out;
}

ScalarField nonnormalized_from_normalized(const ScalarField& u, double t, double beta) {
  const double c = c_beta(t, beta, u.grid().dim());
  ScalarField out = u;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(t) * (u[k] + c);
  return out;
}

}  // namespace reparametrize

}  // namespace rshock
