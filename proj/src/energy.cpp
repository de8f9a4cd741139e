#include "rshock/energy.hpp"

#include <cmath>
#include <fstream>

#include "rshock/field_io.hpp"

namespace rshock {

namespace {

double cell(const PeriodicGrid& g) { return g.dim() == 1 ? g.spacing() : g.spacing() * g.spacing(); }

}  // namespace

MongeAmpereMeasure signed_monge_ampere(const QuasiPeriodicConvex& phi) {
  const HessianField hess = discrete_hessian(phi);
  const double c = cell(phi.grid());
  std::vector<double> mass(hess.size());
  for (std::size_t k = 0; k < hess.size(); ++k) mass[k] = hess.det(k) * c;
  return {phi.grid(), std::move(mass)};
}

double aubin_mabuchi(const QuasiPeriodicConvex& phi) {
  const HessianField hess = discrete_hessian(phi);
  const ScalarField& u = phi.periodic();
  double s = 0.0;
  if (phi.grid().dim() == 1) {
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * (1.0 + hess[k].xx);
    return s * cell(phi.grid()) / 2.0;
  }
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * (1.0 + 0.5 * hess.trace(k) + hess.det(k));
  return s * cell(phi.grid()) / 3.0;
}

double e_theta(const QuasiPeriodicConvex& phi, const ScalarField& f) {
  if (!(f.grid() == phi.grid())) throw InvalidArgument("e_theta: grid mismatch");
  const MongeAmpereMeasure ma = signed_monge_ampere(phi);
  double s = aubin_mabuchi(phi);
  for (std::size_t k = 0; k < ma.mass.size(); ++k) s += (f[k] - phi.periodic()[k]) * ma.mass[k];
  return s;
}

double i_functional(const QuasiPeriodicConvex& u, const QuasiPeriodicConvex& v) {
  if (!(u.grid() == v.grid())) throw InvalidArgument("i_functional: grid mismatch");
  const MongeAmpereMeasure mu = signed_monge_ampere(u);
  const MongeAmpereMeasure mv = signed_monge_ampere(v);
  double s = 0.0;
  for (std::size_t k = 0; k < mu.mass.size(); ++k)
    s += (u.periodic()[k] - v.periodic()[k]) * (mv.mass[k] - mu.mass[k]);
  return s;
}

double entropy(const MongeAmpereMeasure& mu, const MongeAmpereMeasure& mu0) {
  if (mu.mass.size() != mu0.mass.size()) throw InvalidArgument("entropy: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < mu.mass.size(); ++k) {
    const double m = mu.mass[k];
    if (m <= 0.0) continue;
    if (mu0.mass[k] <= 0.0) return std::numeric_limits<double>::infinity();
    s += m * std::log(m / mu0.mass[k]);
  }
  return s;
}

EnergyReport energy_report(double t, const QuasiPeriodicConvex& phi, const MongeAmpereMeasure& mu,
                           const ScalarField& f, const MongeAmpereMeasure& mu0, double beta,
                           const QuasiPeriodicConvex* previous) {
  EnergyReport r;
  r.t = t;
  r.E = aubin_mabuchi(phi);
  r.E_theta = e_theta(phi, f);
  r.entropy = entropy(mu, mu0);
  r.F_beta = std::isinf(r.entropy) ? r.entropy : r.E_theta + r.entropy / beta;
  if (previous) r.I_vs_prev = i_functional(phi, *previous);
  return r;
}

void write_energy_csv(const std::string& path, const std::vector<EnergyReport>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path);
  out << "t,E,E_theta,entropy,F_beta,I_vs_prev\n";
  for (const EnergyReport& r : rows)
    out << format_real(r.t) << ',' << format_real(r.E) << ',' << format_real(r.E_theta) << ','
        << format_real(r.entropy) << ',' << format_real(r.F_beta) << ',' << format_real(r.I_vs_prev) << '\n';
}

}  // namespace rshock
