#pragma once

#include <array>
#include <string>
#include <vector>

#include "rshock/envelope.hpp"
#include "rshock/flow.hpp"

namespace rshock {

struct HSState {
  double lambda = 0.0;
  /// phi_lambda <= 0; Omega = {phi_lambda < -kContactTol}.
  ScalarField phi_lambda;
  std::vector<bool> omega_mask;
  /// sum over Omega of rho0 h^2.
  double area = 0.0;
  long iterations = 0;
  double residual = 0.0;
};

struct HeleShawOptions {
  double epsilon = 0.0;  ///< <= 0 selects h^2
  PsorOptions psor{};
};

/// Weak Hele-Shaw flow: one envelope per lambda (strictly increasing, in
/// [0, 1)), injection at node p. Entries are solved independently.
std::vector<HSState> hs_sweep(const ScalarField& rho0, std::array<int, 2> p, const std::vector<double>& lambdas,
                              const HeleShawOptions& options = {});

/// CSV `lambda,area,defect_vs_lambda,iterations`.
void write_hs_sweep_csv(const std::string& path, const std::vector<HSState>& states);

struct HSEnvelopeComparison {
  double t = 0.0;
  double lambda = 0.0;
  /// Nodes in exactly one of {P(t f_eps) < t f_eps} and Omega^{(lambda)}.
  std::size_t defect = 0;
  std::size_t omega_nodes = 0;
  /// Nodes of Omega^{(lambda)} with a neighbour outside it.
  std::size_t boundary_band = 0;
};

/// Compares the non-coincidence set of P_{omega_0}(t f_eps) with the Hele-Shaw
/// domain at lambda = t/(t+1).
std::vector<HSEnvelopeComparison> hs_vs_envelope_curve(const ScalarField& rho0, std::array<int, 2> p,
                                                       const std::vector<double>& t_list,
                                                       const HeleShawOptions& options = {});

struct HSDensityDefect {
  double t = 0.0;
  double lambda = 0.0;
  /// sup over compared nodes of |rho - target|.
  double defect = 0.0;
  /// Extremes of rho / rho0 over compared nodes of X^{(lambda)}.
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  std::size_t compared = 0;
};

/// Source of the log-diffusion form of the flow with singular twisting
/// rho0 - delta_p, the point mass replaced by its eps-regularization.
ScalarField hs_flow_source(const ScalarField& rho0, std::array<int, 2> p, double epsilon);

/// Compares a flow density at time t with (t+1) rho0 on X^{(lambda(t))} and 0 on
/// Omega^{(lambda(t))}, lambda(t) = t/(t+1). Nodes within `band` cells of the
/// free boundary or of p are skipped.
HSDensityDefect hs_density_limit(const LogDiffusionState& flow, const ScalarField& rho0, std::array<int, 2> p,
                                 const HeleShawOptions& options = {}, int band = 3);

/// Nodes within `radius` cells of a node where the mask changes value.
std::vector<bool> boundary_band(const PeriodicGrid& grid, const std::vector<bool>& mask, int radius);

}  // namespace rshock
