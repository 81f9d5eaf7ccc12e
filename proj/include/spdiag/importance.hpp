#pragma once

#include <spdiag/dataset.hpp>
#include <spdiag/models.hpp>
#include <spdiag/profile.hpp>

#include <Eigen/Core>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace spdiag {

/// Principal-component transform of a block of correlated features.
/// Scores are L' ((x - center) / scale); L has orthonormal columns ordered by
/// explained variance.
struct FeatureGroup {
  std::string name;
  std::vector<Index> members;
  std::vector<std::string> dropped;  // zero-variance members
  Eigen::VectorXd center;
  Eigen::VectorXd scale;
  Eigen::MatrixXd loadings;
  Eigen::VectorXd explained_variance;

  Eigen::VectorXd scores(std::span<const double> row) const;
  /// Member values for the given scores.
  Eigen::VectorXd back_transform(const Eigen::VectorXd& scores) const;
};

struct GroupDefinition {
  std::string name;
  std::vector<std::string> members;
};

/// Standardizes each group's members and fits PC loadings on the whole
/// dataset. Zero-variance members are dropped and listed in
/// FeatureGroup::dropped. Groups must be disjoint with at least two members.
std::vector<FeatureGroup> fit_pc_groups(
    const Dataset& ds, std::span<const GroupDefinition> groups);

/// What gets permuted: a single feature column, or one PC score of a group.
struct PermutationChannel {
  std::string name;
  Index feature = -1;
  std::shared_ptr<const FeatureGroup> group;
  Index component = 0;

  static PermutationChannel for_feature(const Dataset& ds,
                                        const std::string& feature);
  /// Named "<group><component+1>", e.g. "Late1".
  static PermutationChannel for_component(
      std::shared_ptr<const FeatureGroup> group, Index component);
};

/// n_perm predictions with the channel's value replaced by that of a
/// uniformly drawn row of `pool` (the full dataset). Group channels swap one
/// PC score and back-transform before predicting.
std::vector<double> permuted_predictions(const FittedModel& model,
                                         const Location& target,
                                         std::span<const double> features,
                                         const PermutationChannel& channel,
                                         const Dataset& pool, int n_perm,
                                         std::mt19937_64& rng);

struct ImportancePoint {
  double d_hat = 0.0;
  /// Error with permutation minus error without, in the same bin.
  double importance = 0.0;
  /// Monte-Carlo standard error: sd of per-replicate importances / sqrt(n).
  double standard_error = 0.0;
  Index n_records = 0;
  int bin = 0;
};

struct ImportanceProfile {
  std::vector<ImportancePoint> points;
  std::vector<double> smoothed;
};

/// One importance profile per channel, on the bins kept by the clean profile.
struct Svip {
  Profile clean;
  std::map<std::string, ImportanceProfile> channels;
};

/// Channel c of every record must carry n_perm >= 1 predictions; channel
/// names are in record order. Missing channels raise ConfigError.
Svip build_svip(std::span<const ProfileRecord> records,
                std::span<const std::string> channel_names,
                std::span<const double> breakpoints, ErrorMeasure measure,
                const BinningOptions& options = {}, int window = 3);

}  // namespace spdiag
