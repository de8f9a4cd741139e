#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rshock/grid.hpp"

namespace rshock {

struct RandomFieldSpec {
  double h_exponent = 0.5;
  int k_max = 32;
  /// Variance of mode k is amplitude * k^(-3 - 2 h).
  double amplitude = 1.0;
  std::uint64_t seed = 0;

  double mode_variance(int k) const;
  void validate(const PeriodicGrid& grid) const;
};

/// Standard normal draw keyed by (seed, k, component); component 0 is the
/// cosine coefficient, 1 the sine coefficient.
double gaussian_draw(std::uint64_t seed, int k, int component);

/// f(x) = sum_{k=1}^{k_max} A_k cos(2 pi k x) + B_k sin(2 pi k x) on a 1D grid.
ScalarField sample_hamiltonian(const RandomFieldSpec& spec, const PeriodicGrid& grid);

/// Default dyadic box sizes in cells: 2, 4, ..., N/8.
std::vector<int> default_box_scales(const PeriodicGrid& grid);

/// Least-squares slope of log N(s) against log(1/s) for box sizes s (cells).
/// Throws EmptySupport if the mask is empty, InvalidArgument for < 2 scales.
double box_dimension(const std::vector<bool>& mask, const std::vector<int>& scales);

/// Cells whose Monge-Ampere mass exceeds (total / N) * 1e-3.
std::vector<bool> ma_support(const MongeAmpereMeasure& ma);

struct DimensionSample {
  std::uint64_t seed = 0;
  double h = 0.0;
  double t = 0.0;
  double dimension = 0.0;
  std::size_t support_cells = 0;
};

/// Box dimension of the Monge-Ampere support of the envelope of
/// |x|^2/2 + t f for the random f of `spec`.
DimensionSample random_envelope_dimension(const RandomFieldSpec& spec, const PeriodicGrid& grid, double t);

/// CSV `seed,h,t,dimension,support_cells`.
void write_ensemble_csv(const std::string& path, const std::vector<DimensionSample>& rows);

}  // namespace rshock
