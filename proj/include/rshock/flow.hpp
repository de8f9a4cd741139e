#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

enum class Scheme { explicit_adaptive, semi_implicit_newton };

struct FlowConfig {
  double dt_initial = 1e-3;
  double dt_min = 1e-10;
  Scheme scheme = Scheme::semi_implicit_newton;
  /// Hessian floor: smaller eigenvalues are clamped inside log and counted.
  double delta_min = 1e-12;
  double newton_tol = 1e-11;
  int newton_max_iters = 60;
  int max_halvings = 40;

  void validate() const;
};

/// State of a finite-beta flow.
///
/// In 1D the semi-implicit scheme advances the log of the Hessian density
/// a = c(t) + u'' alongside u, where c(t) = 1 + class_rate * t is the
/// reference class. Keeping log(a) exact lets the flow enter the degenerate
/// regime (a ~ exp(-beta)) without clamping.
struct FlowState {
  double t = 0.0;
  double beta = 1.0;
  QuasiPeriodicConvex phi;
  /// Reference class (1 + class_rate t) Id of the non-normalized flow.
  double class_rate = 0.0;
  /// 1D only: log of the Hessian density at every node.
  std::optional<ScalarField> log_hessian;
  double min_hess_eig = 1.0;
  double max_hess_trace = 1.0;
  long clamp_events = 0;
  double last_dt = 0.0;
  /// sup |d phi / dt| over the last step.
  double last_rate = 0.0;

  /// Builds the initial state; throws NonConvexState if phi is not strictly convex.
  static FlowState initial(QuasiPeriodicConvex phi, double beta, double t0 = 0.0, double class_rate = 0.0);

  /// Monge-Ampere cell masses of the current state (uses log_hessian in 1D).
  MongeAmpereMeasure measure() const;
};

/// One step of d phi/dt = (1/beta) log det(D^2 phi) + H.
///
/// The reference class is (1 + state.class_rate t) Id; class_rate = 0 is the
/// flow in the fixed class of |x|^2/2. A failed step (Newton divergence
/// or loss of convexity) is retried with dt halved, at most cfg.max_halvings
/// times; StepUnderflow once dt < dt_min.
FlowState step_nonnormalized(const FlowState& state, const ScalarField& hamiltonian, const FlowConfig& cfg);

/// One step of d phi/dt = (1/beta) log(MA(phi)/dV) - phi + f in the fixed class.
FlowState step_normalized(const FlowState& state, const ScalarField& f, const MongeAmpereMeasure& dv,
                          const FlowConfig& cfg);

/// Integrates to t_end, trimming the last step; `observer` sees every accepted state.
using FlowObserver = std::function<void(const FlowState&)>;
FlowState integrate_nonnormalized(FlowState state, const ScalarField& hamiltonian, const FlowConfig& cfg,
                                  double t_end, const FlowObserver& observer = {});
FlowState integrate_normalized(FlowState state, const ScalarField& f, const MongeAmpereMeasure& dv,
                               const FlowConfig& cfg, double t_end, const FlowObserver& observer = {});

/// One row of the trajectory log.
struct TrajectoryRow {
  double t = 0.0;
  double beta = 0.0;
  double sup_err_vs_envelope = 0.0;
  double min_hess_eig = 0.0;
  double max_hess_trace = 0.0;
  long clamp_events = 0;
  double dt = 0.0;
};

TrajectoryRow trajectory_row(const FlowState& state, double sup_err_vs_envelope);
/// CSV with header `t,beta,sup_err_vs_envelope,min_hess_eig,max_hess_trace,clamp_events,dt`.
void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows);

/// Hamiltonian of the viscous equation d psi/dt + H(grad psi) = (1/beta) lap psi.
class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;
  virtual double value(std::span<const double> p) const = 0;
  /// Godunov flux from the left/right one-sided slopes (1D).
  virtual double godunov(double p_minus, double p_plus) const = 0;
  /// Bound on |dH/dp| over |p| <= p_max, used for local Lax-Friedrichs in 2D.
  virtual double slope_bound(double p_max) const = 0;
};

/// H(p) = |p|^2 / 2.
class QuadraticHamiltonian final : public Hamiltonian {
 public:
  double value(std::span<const double> p) const override;
  double godunov(double p_minus, double p_plus) const override;
  double slope_bound(double p_max) const override { return p_max; }
};

/// Periodic H sampled on a grid, evaluated by (bi)linear interpolation.
class PeriodicHamiltonian final : public Hamiltonian {
 public:
  explicit PeriodicHamiltonian(ScalarField h);
  double value(std::span<const double> p) const override;
  double godunov(double p_minus, double p_plus) const override;
  double slope_bound(double p_max) const override;

 private:
  ScalarField h_;
  double lipschitz_;
};

/// One explicit step of d psi/dt + H(grad psi) = (1/beta) lap psi.
/// 1D uses the Godunov flux, 2D local Lax-Friedrichs. Throws CflViolation if
/// dt > 0.9 h^2 beta / (2 n).
ScalarField step_linear_viscosity(const ScalarField& psi, const Hamiltonian& hamiltonian, double beta, double dt);

/// Numerical Hamiltonian averaged over the grid for the field psi (the exact
/// per-step change of mean(psi) is -dt times this value).
double mean_numerical_hamiltonian(const ScalarField& psi, const Hamiltonian& hamiltonian);

/// 2D logarithmic diffusion d rho/dt = (1/(4 pi beta)) lap log rho + source,
/// advanced in the variable log rho so that positivity is structural.
struct LogDiffusionState {
  double t = 0.0;
  ScalarField log_rho;
  double last_dt = 0.0;

  static LogDiffusionState from_density(const ScalarField& rho, double t0 = 0.0);
  ScalarField density() const;
  double mass() const;
};

LogDiffusionState step_log_diffusion_2d(const LogDiffusionState& state, const ScalarField& source, double beta,
                                        const FlowConfig& cfg);

/// Convenience wrapper on densities; throws PositivityLoss if rho is not positive.
ScalarField step_log_diffusion_2d(const ScalarField& rho, const ScalarField& source, double beta,
                                  const FlowConfig& cfg);

LogDiffusionState integrate_log_diffusion_2d(LogDiffusionState state, const ScalarField& source, double beta,
                                             const FlowConfig& cfg, double t_end);

/// Time change between the non-normalized (s) and normalized (t) flows,
/// e^t = s + 1, and the potential scaling u~(s) = e^t (u(t) + c_beta(t)).
namespace reparametrize {
double t_from_s(double s);
double s_from_t(double t);
/// c_beta(t) = (n / beta) (t - 1 + e^{-t}).
double c_beta(double t, double beta, int n);
ScalarField normalized_from_nonnormalized(const ScalarField& u_tilde, double s, double beta);
ScalarField nonnormalized_from_normalized(const ScalarField& u, double t, double beta);
}  // namespace reparametrize

}  // namespace rshock
