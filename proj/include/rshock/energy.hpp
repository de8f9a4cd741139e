#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

/// Aubin-Mabuchi energy (1/(n+1)) sum_j sum_nodes u MA_j h^n, where MA_j is
/// the mixed discrete determinant of j copies of D^2 phi and n - j identities
/// (2D mixed term: tr(D^2 phi) / 2).
double aubin_mabuchi(const QuasiPeriodicConvex& phi);

/// E(phi) - sum u MA(phi) + sum f MA(phi).
double e_theta(const QuasiPeriodicConvex& phi, const ScalarField& f);

/// sum (u - v)(MA(v) - MA(u)).
double i_functional(const QuasiPeriodicConvex& u, const QuasiPeriodicConvex& v);

/// sum mu log(mu / mu0) over cells; +infinity if mu charges a mu0-null cell.
double entropy(const MongeAmpereMeasure& mu, const MongeAmpereMeasure& mu0);

/// Signed discrete Monge-Ampere masses det(D^2 phi) h^n (no clamping).
MongeAmpereMeasure signed_monge_ampere(const QuasiPeriodicConvex& phi);

struct EnergyReport {
  double t = 0.0;
  double E = 0.0;
  double E_theta = 0.0;
  double entropy = 0.0;
  double F_beta = 0.0;
  /// I(phi, previous phi); NaN for the first row.
  double I_vs_prev = std::numeric_limits<double>::quiet_NaN();
};

/// Report for phi at time t. `mu` is the Monge-Ampere measure used in the
/// entropy (pass the flow's own measure to keep degenerate cells exact);
/// F_beta = E_theta + entropy / beta, or the entropy sentinel.
EnergyReport energy_report(double t, const QuasiPeriodicConvex& phi, const MongeAmpereMeasure& mu,
                           const ScalarField& f, const MongeAmpereMeasure& mu0, double beta,
                           const QuasiPeriodicConvex* previous = nullptr);

/// CSV `t,E,E_theta,entropy,F_beta,I_vs_prev`.
void write_energy_csv(const std::string& path, const std::vector<EnergyReport>& rows);

}  // namespace rshock
