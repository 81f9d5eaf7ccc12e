#pragma once

#include <spdiag/types.hpp>

#include <span>
#include <string>
#include <vector>

namespace spdiag {

enum class ErrorMeasure { rmse, misclassification };

std::string to_string(ErrorMeasure m);
ErrorMeasure parse_error_measure(const std::string& name);

/// RMSE or the fraction of mismatched labels. Misclassification requires
/// integral class codes (TypeError otherwise); both require a non-empty,
/// equal-length input.
double error_measure(std::span<const double> observed,
                     std::span<const double> predicted, ErrorMeasure kind);

/// b_j = d_min + (d_max - d_min) (j / n_bins)^2, j = 0..n_bins.
std::vector<double> quadratic_breakpoints(double d_min, double d_max,
                                          int n_bins);

/// Bin of each distance: [b_j, b_j+1) with the last bin closed; -1 when
/// outside [b_0, b_n].
std::vector<int> assign_bins(std::span<const double> distances,
                             std::span<const double> breakpoints);

/// One outcome of a buffered leave-one-out iteration.
struct ProfileRecord {
  std::size_t iteration = 0;
  Index target = 0;
  double r = 0.0;
  /// Actual separation distance from the target to the training set.
  double d = 0.0;
  double y = 0.0;
  double y_hat = 0.0;
  Index train_size = 0;
  /// permuted[c][j]: j-th permuted prediction for permutation channel c.
  std::vector<std::vector<double>> permuted;
};

struct ProfilePoint {
  /// Median recorded distance in the bin.
  double d_hat = 0.0;
  double value = 0.0;
  Index n_records = 0;
  double mean_train_size = 0.0;
  /// Index of the bin in the breakpoint layout.
  int bin = 0;
};

struct Profile {
  std::vector<ProfilePoint> points;
  std::vector<double> smoothed;
  std::string measure;
};

struct BinningOptions {
  /// Bins with fewer records are dropped.
  Index min_records = 20;
};

/// Per-bin error over the records, keyed by the median distance.
/// Throws EstimationError when no bin survives.
Profile bin_records(std::span<const ProfileRecord> records,
                    std::span<const double> breakpoints, ErrorMeasure measure,
                    const BinningOptions& options = {});

/// Centered moving-average weights (1, 2, ..., h+1, ..., 2, 1) for
/// window = 2h + 1.
std::vector<double> triangular_weights(int window);

/// Centered weighted moving average of a value series; truncated windows at
/// the edges are renormalized. Window must be odd and match weights.size().
std::vector<double> smooth_values(std::span<const double> values,
                                  std::span<const double> weights);

/// Fills `smoothed` (triangular weights by default); d_hat is untouched.
Profile smooth_profile(Profile p, int window = 3);
Profile smooth_profile(Profile p, std::span<const double> weights);

}  // namespace spdiag
