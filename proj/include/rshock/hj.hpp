#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

enum class HopfProvenance { hopf_lax, second_hopf };

/// Solution of the Hamilton-Jacobi equation at time t, sampled on the nodes
/// of [0,1)^n. For second_hopf the values are the periodic part psi - |y|^2/2;
/// for hopf_lax they are the full values of the inf-convolution minus
/// quadratic_coeff |y|^2/2 of the initial datum (see hopf_lax).
struct HopfSolution {
  ScalarField psi;
  double t = 0.0;
  HopfProvenance provenance = HopfProvenance::second_hopf;

  QuasiPeriodicConvex as_convex() const { return QuasiPeriodicConvex(psi); }
};

/// psi_t = (psi0* + tH)*, the convex viscosity solution of d psi/dt + H(grad psi) = 0.
HopfSolution second_hopf(const QuasiPeriodicConvex& psi0, const ScalarField& hamiltonian, double t);

/// Convex conjugate H*(p) of the Hamiltonian, evaluated at slopes p.
using ConjugateHamiltonian = std::function<double(std::span<const double>)>;

/// |p|^2 / 2.
double quadratic_conjugate(std::span<const double> p);

/// psi_t(y) = inf_x psi0(x) + t H*((x - y)/t), by direct minimization over the
/// one-period-padded nodes. The initial datum is psi0(x) = q |x|^2/2 + u0(x)
/// with u0 periodic and q = quadratic_coeff; the returned field is
/// psi_t(y) - q |y|^2/2 at the nodes y of [0,1)^n (periodic when q = 0).
HopfSolution hopf_lax(const ScalarField& u0, double quadratic_coeff, const ConjugateHamiltonian& hstar, double t);

struct HopfDuality {
  /// sup |(psi_t - |y|^2/2) + t Phi_t| over nodes.
  double defect = 0.0;
  /// psi_t from the second Hopf formula with H = Phi0 and psi0 = |y|^2/2.
  HopfSolution psi;
  /// Phi_t from the Hopf-Lax formula with H* = |p|^2/2.
  HopfSolution phi;
  /// Nodes where exactly one of the two shock masks is set.
  std::size_t shock_mismatch = 0;
};

/// Checks psi_t(y) = |y|^2/2 - t Phi_t(y). The shock mask of Phi_t is read off
/// the one-sided gradient jump of the semiconcave Phi_t, scaled by t.
HopfDuality hopf_duality_check(const ScalarField& phi0, double t);

struct BurgersVelocity {
  /// Backward and forward differences of psi; gap = right - left.
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> gap;
};

/// One-sided gradients of a quasi-periodic psi (1D) at every node.
BurgersVelocity burgers_velocity(const QuasiPeriodicConvex& psi);

/// One-sided gradients of chart samples values[k] at spacing h, for the
/// interior nodes 1..size-2.
BurgersVelocity burgers_velocity(std::span<const double> values, double h);

}  // namespace rshock
