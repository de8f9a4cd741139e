#include "rshock/hj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rshock/legendre.hpp"
#include "rshock/parallel.hpp"
#include "rshock/shocks.hpp"

namespace rshock {

HopfSolution second_hopf(const QuasiPeriodicConvex& psi0, const ScalarField& hamiltonian, double t) {
  if (t < 0.0) throw InvalidArgument("second_hopf: t must be nonnegative");
  if (!(hamiltonian.grid() == psi0.grid())) throw InvalidArgument("second_hopf: grid mismatch");
  QuasiPeriodicConvex dual = lft(psi0).dual;
  dual.periodic() += t * hamiltonian;
  return {std::move(lft(dual).dual.periodic()), t, HopfProvenance::second_hopf};
}

double quadratic_conjugate(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return 0.5 * s;
}

HopfSolution hopf_lax(const ScalarField& u0, double q, const ConjugateHamiltonian& hstar, double t) {
  if (!(t > 0.0)) throw InvalidArgument("hopf_lax: t must be positive");
  const PeriodicGrid& g = u0.grid();
  const int n = g.n();
  ScalarField out(g);
  if (g.dim() == 1) {
    parallel_for(g.size(), [&](std::size_t k) {
      const double y = g.coord(int(k));
      double best = std::numeric_limits<double>::infinity();
      for (int e = -n; e < 2 * n; ++e) {
        const double x = g.coord(e);
        const double p = (x - y) / t;
        best = std::min(best, 0.5 * q * x * x + u0.at(e) + t * hstar(std::span<const double>(&p, 1)));
      }
      out[k] = best - 0.5 * q * y * y;
    });
  } else {
    parallel_for(g.size(), [&](std::size_t k) {
      const auto [i, j] = g.coords(k);
      const double y1 = g.coord(i), y2 = g.coord(j);
      double best = std::numeric_limits<double>::infinity();
      for (int e1 = -n; e1 < 2 * n; ++e1) {
        const double x1 = g.coord(e1);
        for (int e2 = -n; e2 < 2 * n; ++e2) {
          const double x2 = g.coord(e2);
          const double p[2] = {(x1 - y1) / t, (x2 - y2) / t};
          best = std::min(best, 0.5 * q * (x1 * x1 + x2 * x2) + u0.at(e1, e2) + t * hstar(p));
        }
      }
      out[k] = best - 0.5 * q * (y1 * y1 + y2 * y2);
    });
  }
  return {std::move(out), t, HopfProvenance::hopf_lax};
}

HopfDuality hopf_duality_check(const ScalarField& phi0, double t) {
  if (!(t > 0.0)) throw InvalidArgument("hopf_duality_check: t must be positive");
  const PeriodicGrid& g = phi0.grid();
  HopfDuality d{0.0, second_hopf(QuasiPeriodicConvex::quadratic(g), phi0, t),
                hopf_lax(phi0, 0.0, quadratic_conjugate, t), 0};
  for (std::size_t k = 0; k < g.size(); ++k) d.defect = std::max(d.defect, std::abs(d.psi.psi[k] + t * d.phi.psi[k]));

  const ShockSet psi_shocks = extract_shocks(d.psi.as_convex());
  // -t Phi_t is the periodic part of psi_t, so its kinks are the shocks of Phi_t.
  const ShockSet phi_shocks = extract_shocks(QuasiPeriodicConvex((-t) * d.phi.psi), psi_shocks.tau);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (psi_shocks.mask[k] != phi_shocks.mask[k]) ++d.shock_mismatch;
  return d;
}

BurgersVelocity burgers_velocity(const QuasiPeriodicConvex& psi) {
  const PeriodicGrid& g = psi.grid();
  if (g.dim() != 1) throw InvalidArgument("burgers_velocity: 1D only");
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  BurgersVelocity v;
  v.left.resize(std::size_t(n));
  v.right.resize(std::size_t(n));
  v.gap.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t k = std::size_t(i);
    v.left[k] = (psi.total(i) - psi.total(i - 1)) * inv_h;
    v.right[k] = (psi.total(i + 1) - psi.total(i)) * inv_h;
    v.gap[k] = v.right[k] - v.left[k];
  }
  return v;
}

BurgersVelocity burgers_velocity(std::span<const double> values, double h) {
  if (values.size() < 3) throw InvalidArgument("burgers_velocity: need at least 3 samples");
  if (!(h > 0.0)) throw InvalidArgument("burgers_velocity: h must be positive");
  BurgersVelocity v;
  for (std::size_t k = 1; k + 1 < values.size(); ++k) {
    v.left.push_back((values[k] - values[k - 1]) / h);
    v.right.push_back((values[k + 1] - values[k]) / h);
    v.gap.push_back(v.right.back() - v.left.back());
  }
  return v;
}

}  // namespace rshock
