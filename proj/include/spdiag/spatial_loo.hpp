#pragma once

#include <spdiag/dataset.hpp>
#include <spdiag/importance.hpp>
#include <spdiag/models.hpp>
#include <spdiag/profile.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace spdiag {

struct DiagnosticsConfig {
  /// Buffer radius range; r_min < 0 includes plain leave-one-out.
  double r_min = -1.0;
  double r_max = 1000.0;
  int n_reps = 2000;
  int n_bins = 25;
  std::uint64_t seed = 1;
  ErrorMeasure measure = ErrorMeasure::rmse;
  int n_perm = 5;
  Index min_bin_records = 20;
  int smoothing_window = 3;
  /// Worker threads; 0 takes the hardware concurrency. SPDIAG_THREADS caps it.
  unsigned threads = 0;

  void validate() const;
};

struct LooRun {
  std::vector<ProfileRecord> records;  // sorted by iteration
  std::vector<std::string> channels;
  Index skipped_exhausted = 0;
  Index skipped_failed = 0;
};

/// n_reps iterations, each with its own generator derived from
/// (seed, iteration): draw the target i and r ~ U[r_min, r_max], drop the
/// buffer, fit on the rest and predict the target, plus n_perm permuted
/// predictions per channel from the same fit. Iterations whose buffer
/// exhausts the data or whose fit fails are skipped; more than half skipped
/// raises ConfigError. Results do not depend on the number of workers.
LooRun run_spatial_loo(const Dataset& ds, const ModelSpec& spec,
                       const DiagnosticsConfig& cfg,
                       std::span<const PermutationChannel> channels = {});

/// Breakpoints for cfg (quadratic over [0, r_max]).
std::vector<double> profile_breakpoints(const DiagnosticsConfig& cfg);

/// Binned and smoothed error profile of a run.
Profile spep(const LooRun& run, const DiagnosticsConfig& cfg);

Svip svip(const LooRun& run, const DiagnosticsConfig& cfg);

/// Mean number of observations farther than r from each observation, i.e.
/// the expected buffered leave-one-out training size at radius r.
double mean_training_size(const Dataset& ds, double r);

}  // namespace spdiag
