#pragma once

#include <spdiag/dataset.hpp>
#include <spdiag/models.hpp>
#include <spdiag/profile.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace spdiag {

enum class CvKind { resubstitution, loo, random_kfold, kmeans_spatial, field_level };

std::string to_string(CvKind kind);
CvKind parse_cv_kind(const std::string& name);

struct CvScheme {
  CvKind kind = CvKind::loo;
  int k = 10;
  /// Forced to 1 for the deterministic kinds (resubstitution, loo).
  int repetitions = 50;
  std::uint64_t seed = 1;
  /// random_kfold only: assign whole groups instead of observations.
  bool by_group = false;

  int effective_repetitions() const;
  void validate(const Dataset& ds) const;
};

/// Test index sets of one repetition; training sets are the complements
/// (resubstitution: a single fold that is both).
using FoldSet = std::vector<std::vector<Index>>;

struct KMeansResult {
  Eigen::MatrixX2d centers;
  std::vector<int> assignment;
  double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by inertia.
KMeansResult kmeans(const Coordinates& points, int k, int restarts,
                    std::mt19937_64& rng);

/// Fold sets for every repetition. For classification, a partition whose
/// training part lacks a class is redrawn up to 10 times (counted in
/// `redraws`) before FitError.
std::vector<FoldSet> make_folds(const Dataset& ds, const CvScheme& scheme,
                                Index* redraws = nullptr);

/// Distance from every test observation to the nearest training observation
/// of its fold, pooled over repetitions.
std::vector<double> cv_prediction_distances(const Dataset& ds,
                                            const std::vector<FoldSet>& folds,
                                            bool resubstitution = false);

struct CvResult {
  CvScheme scheme;
  std::string model;
  double estimate = 0.0;
  std::vector<double> per_repetition;
  std::vector<double> distances;
  double mean_distance = 0.0;
  DistanceSummary distance_summary;
  Index redraws = 0;
};

/// Per repetition, the error measure over all test predictions; the estimate
/// is the mean over repetitions.
CvResult run_cv(const Dataset& ds, const ModelSpec& spec,
                const CvScheme& scheme, ErrorMeasure measure,
                const HistogramSpec& hist = {});

/// Histogram and summary of the pooled test-to-training distances.
DistanceSummary cv_distance_report(const CvResult& result,
                                   const HistogramSpec& hist = {});

}  // namespace spdiag
