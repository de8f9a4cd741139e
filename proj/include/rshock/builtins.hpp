#pragma once

#include <string>
#include <vector>

#include "rshock/grid.hpp"
#include "rshock/shocks.hpp"

namespace rshock {

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> list_builtins();

/// Named benchmark Hamiltonians, `name[:key=value,...]`:
///   zero
///   cosine:a=<a>       a cos(2 pi x)  (2D: a (cos 2 pi x + cos 2 pi y))
///   wells1|wells2|wells3[:c=<c>]
///                      c * squared torus distance to the nearest site of
///                      builtin_sites(name); minimum 0 exactly at the sites
///   two-well           alias of wells2
///   random:h=<h>,kmax=<k>,amp=<c>,seed=<s>   1D random Fourier series
/// Throws UnknownBuiltin for unknown names or keys.
ScalarField builtin_hamiltonian(const std::string& spec, const PeriodicGrid& grid);

/// Sites of the wells benchmarks (grid-aligned for N divisible by 16).
std::vector<Site> builtin_sites(const std::string& name, int dim);

}  // namespace rshock
