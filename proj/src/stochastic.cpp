#include "rshock/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "rshock/envelope.hpp"
#include "rshock/field_io.hpp"

namespace rshock {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform in (0, 1) from the top 53 bits.
double unit_open(std::uint64_t bits) { return (double(bits >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace

double RandomFieldSpec::mode_variance(int k) const { return amplitude * std::pow(double(k), -3.0 - 2.0 * h_exponent); }

void RandomFieldSpec::validate(const PeriodicGrid& grid) const {
  if (grid.dim() != 1) throw InvalidArgument("random Hamiltonians are 1D");
  if (h_exponent < -1.0 || h_exponent > 1.0) throw InvalidArgument("h_exponent must lie in [-1, 1]");
  if (k_max < 1 || k_max > grid.n() / 2) throw InvalidArgument("k_max must lie in [1, N/2]");
  if (!(amplitude >= 0.0)) throw InvalidArgument("amplitude must be nonnegative");
}

double gaussian_draw(std::uint64_t seed, int k, int component) {
  // Box-Muller on two uniforms keyed by (seed, k, component).
  const std::uint64_t key = splitmix64(seed) ^ splitmix64((std::uint64_t(k) << 1) | std::uint64_t(component));
  const double u1 = unit_open(splitmix64(key));
  const double u2 = unit_open(splitmix64(key ^ 0xD1B54A32D192ED03ull));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ScalarField sample_hamiltonian(const RandomFieldSpec& spec, const PeriodicGrid& grid) {
  spec.validate(grid);
  const int n = grid.n();
  std::vector<double> a(std::size_t(spec.k_max) + 1), b(std::size_t(spec.k_max) + 1);
  for (int k = 1; k <= spec.k_max; ++k) {
    const double sd = std::sqrt(spec.mode_variance(k));
    a[std::size_t(k)] = sd * gaussian_draw(spec.seed, k, 0);
    b[std::size_t(k)] = sd * gaussian_draw(spec.seed, k, 1);
  }
  // cos/sin table over the N nodes; (k i) mod N indexes it exactly.
  std::vector<double> c(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    c[std::size_t(m)] = std::cos(2.0 * std::numbers::pi * m / n);
    s[std::size_t(m)] = std::sin(2.0 * std::numbers::pi * m / n);
  }
  ScalarField f(grid);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int k = 1; k <= spec.k_max; ++k) {
      const std::size_t m = std::size_t((long(k) * i) % n);
      v += a[std::size_t(k)] * c[m] + b[std::size_t(k)] * s[m];
    }
    f[std::size_t(i)] = v;
  }
  return f;
}

std::vector<int> default_box_scales(const PeriodicGrid& grid) {
  std::vector<int> out;
  for (int s = 2; s <= grid.n() / 8; s *= 2) out.push_back(s);
  return out;
}

double box_dimension(const std::vector<bool>& mask, const std::vector<int>& scales) {
  if (scales.size() < 2) throw InvalidArgument("box_dimension: need at least two scales");
  if (std::find(mask.begin(), mask.end(), true) == mask.end()) throw EmptySupport("box_dimension: empty mask");
  const std::size_t n = mask.size();
  std::vector<double> lx, ly;
  for (int s : scales) {
    if (s < 1 || n % std::size_t(s) != 0) throw InvalidArgument("box_dimension: scales must divide N");
    std::size_t occupied = 0;
    for (std::size_t b = 0; b < n; b += std::size_t(s))
      if (std::any_of(mask.begin() + long(b), mask.begin() + long(b + std::size_t(s)), [](bool v) { return v; }))
        ++occupied;
    // eps = s h, so log(1/eps) = log(N / s)
    lx.push_back(std::log(double(n) / s));
    ly.push_back(std::log(double(occupied)));
  }
  const double m = double(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<bool> ma_support(const MongeAmpereMeasure& ma) {
  const double threshold = ma.total() / double(ma.mass.size()) * 1e-3;
  std::vector<bool> out(ma.mass.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = ma.mass[k] > threshold;
  return out;
}

DimensionSample random_envelope_dimension(const RandomFieldSpec& spec, const PeriodicGrid& grid, double t) {
  const ScalarField f = sample_hamiltonian(spec, grid);
  const EnvelopeResult env = project_convex(QuasiPeriodicConvex::quadratic(grid), f, t);
  const std::vector<bool> support = ma_support(monge_ampere(env.as_convex()));
  const std::size_t cells = std::size_t(std::count(support.begin(), support.end(), true));
  return {spec.seed, spec.h_exponent, t, box_dimension(support, default_box_scales(grid)), cells};
}

void write_ensemble_csv(const std::string& path, const std::vector<DimensionSample>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path);
  out << "seed,h,t,dimension,support_cells\n";
  for (const DimensionSample& r : rows)
    out << r.seed << ',' << format_real(r.h) << ',' << format_real(r.t) << ',' << format_real(r.dimension) << ','
        << r.support_cells << '\n';
}

}  // namespace rshock
