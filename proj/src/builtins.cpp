#include "rshock/builtins.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "rshock/stochastic.hpp"

namespace rshock {

namespace {

struct ParsedSpec {
  std::string name;
  std::map<std::string, std::string> params;
};

ParsedSpec parse_spec(const std::string& spec) {
  ParsedSpec p;
  const auto colon = spec.find(':');
  p.name = spec.substr(0, colon);
  if (colon == std::string::npos) return p;
  std::string rest = spec.substr(colon + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UnknownBuiltin("malformed builtin parameter '" + item + "' in " + spec);
    p.params[item.substr(0, eq)] = item.substr(eq + 1);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return p;
}

double take(ParsedSpec& p, const std::string& key, double fallback) {
  const auto it = p.params.find(key);
  if (it == p.params.end()) return fallback;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != it->second.size()) throw UnknownBuiltin("builtin parameter " + key + " is not a number: " + it->second);
  p.params.erase(it);
  return v;
}

void require_consumed(const ParsedSpec& p) {
  if (!p.params.empty()) throw UnknownBuiltin("unknown parameter '" + p.params.begin()->first + "' for " + p.name);
}

double torus_dist2_to_sites(const std::vector<Site>& sites, int dim, double x, double y) {
  double best = HUGE_VAL;
  for (const Site& s : sites) {
    double d2 = 0.0;
    const double c[2] = {x, y};
    for (int d = 0; d < dim; ++d) {
      double diff = std::abs(c[d] - s[std::size_t(d)]);
      diff = std::min(diff, 1.0 - diff);
      d2 += diff * diff;
    }
    best = std::min(best, d2);
  }
  return best;
}

}  // namespace

std::vector<BuiltinInfo> list_builtins() {
  return {
      {"zero", "H = 0"},
      {"cosine:a=<a>", "a cos(2 pi x); in 2D a (cos 2 pi x + cos 2 pi y); default a = 1"},
      {"wells1[:c=<c>]", "c * squared torus distance to the site {0} (1D) / {(0,0)} (2D)"},
      {"wells2[:c=<c>]", "two isolated minima: {0, 0.5} (1D), {(0.25,0.25), (0.75,0.625)} (2D)"},
      {"wells3[:c=<c>]", "three isolated minima: {0, 0.25, 0.625} (1D), {(0.25,0.25), (0.75,0.375), (0.4375,0.8125)} (2D)"},
      {"two-well[:c=<c>]", "alias of wells2"},
      {"random:h=<h>,kmax=<k>,amp=<c>,seed=<s>", "1D Gaussian Fourier series, mode variance c k^(-3-2h)"},
  };
}

std::vector<Site> builtin_sites(const std::string& name, int dim) {
  const std::string n = name == "two-well" ? "wells2" : name;
  if (dim == 1) {
    if (n == "wells1") return {{0.0, 0.0}};
    if (n == "wells2") return {{0.0, 0.0}, {0.5, 0.0}};
    if (n == "wells3") return {{0.0, 0.0}, {0.25, 0.0}, {0.625, 0.0}};
  } else if (dim == 2) {
    if (n == "wells1") return {{0.0, 0.0}};
    if (n == "wells2") return {{0.25, 0.25}, {0.75, 0.625}};
    if (n == "wells3") return {{0.25, 0.25}, {0.75, 0.375}, {0.4375, 0.8125}};
  }
  throw UnknownBuiltin("no site set named " + name);
}

ScalarField builtin_hamiltonian(const std::string& spec, const PeriodicGrid& grid) {
  ParsedSpec p = parse_spec(spec);
  const int dim = grid.dim();
  if (p.name == "zero") {
    require_consumed(p);
    return ScalarField(grid);
  }
  if (p.name == "cosine") {
    const double a = take(p, "a", 1.0);
    require_consumed(p);
    if (dim == 1) return ScalarField::sample(grid, [a](double x) { return a * std::cos(2.0 * std::numbers::pi * x); });
    return ScalarField::sample(grid, [a](double x, double y) {
      return a * (std::cos(2.0 * std::numbers::pi * x) + std::cos(2.0 * std::numbers::pi * y));
    });
  }
  if (p.name == "wells1" || p.name == "wells2" || p.name == "wells3" || p.name == "two-well") {
    const double c = take(p, "c", 1.0);
    require_consumed(p);
    const std::vector<Site> sites = builtin_sites(p.name, dim);
    if (dim == 1) return ScalarField::sample(grid, [&](double x) { return c * torus_dist2_to_sites(sites, 1, x, 0.0); });
    return ScalarField::sample(grid, [&](double x, double y) { return c * torus_dist2_to_sites(sites, 2, x, y); });
  }
  if (p.name == "random") {
    RandomFieldSpec rs;
    rs.h_exponent = take(p, "h", 0.5);
    rs.k_max = int(take(p, "kmax", grid.n() / 2));
    rs.amplitude = take(p, "amp", 1e-3);
    rs.seed = std::uint64_t(take(p, "seed", 0.0));
    require_consumed(p);
    return sample_hamiltonian(rs, grid);
  }
  throw UnknownBuiltin("unknown builtin Hamiltonian '" + p.name + "' (see rshock list-builtins)");
}

}  // namespace rshock
