#pragma once

#include <spdiag/dataset.hpp>
#include <spdiag/variogram.hpp>

#include <cstdint>

namespace spdiag {

/// Gaussian random field plus a linear trend in the coordinates, sampled at
/// uniform random locations in [0, extent]^2. Features are x and y.
struct SynthConfig {
  Index n = 100;
  double extent = 1000.0;
  double intercept = 0.0;
  double slope_x = 0.0;
  double slope_y = 0.0;
  Variogram variogram;
  std::uint64_t seed = 1;
};

/// The field is drawn through a Cholesky factor of the covariance at the
/// sampled locations; measurement error is added independently.
/// Throws ParameterError for invalid parameters or a covariance that is not
/// positive definite.
Dataset synth_dataset(const SynthConfig& config);

/// Clustered-field classification fixture: square fields of grid cells, each
/// field one class, with correlated blocks of seasonal features.
struct FieldSynthConfig {
  int n_fields = 60;
  int n_classes = 4;
  int cells_per_side = 3;
  double cell_size = 30.0;
  /// Minimum edge-to-edge gap between fields.
  double min_gap = 150.0;
  double extent = 6000.0;
  /// Sizes of the correlated feature blocks (early, mid, late season).
  std::vector<int> block_sizes = {4, 2, 6};
  /// Within-block correlation of the noise.
  double block_correlation = 0.9;
  /// Class separation in noise standard deviations.
  double class_separation = 0.4;
  /// Share of noise variance that is constant within a field.
  double field_effect = 0.5;
  std::uint64_t seed = 1;
};

/// Feature names are block-prefixed ("early1", ..., "late6"); groups are the
/// field ids; coordinates are not registered as features.
Dataset synth_fields(const FieldSynthConfig& config);

}  // namespace spdiag
