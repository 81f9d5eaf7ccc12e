#pragma once

#include <spdiag/dataset.hpp>
#include <spdiag/variogram.hpp>

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spdiag {

enum class ModelKind { nn, ok, ked, mlr, gwr, rf, ok_rf, lda, nn_lda };

std::string to_string(ModelKind kind);
/// Accepts "NN", "OK", "KED", "MLR", "GWR", "RF", "OK_RF"/"OK-RF", "LDA",
/// "NN_LDA"/"NN-LDA" (case-insensitive). Throws ConfigError otherwise.
ModelKind parse_model_kind(const std::string& name);

struct ForestParams {
  int n_trees = 500;
  /// Defaults: max(1, floor(p/3)) for regression, floor(sqrt(p)) for
  /// classification.
  std::optional<int> mtry;
  /// Defaults: 5 for regression, 1 for classification.
  std::optional<int> min_node_size;
  bool bootstrap = true;
};

struct GwrParams {
  int n_bandwidths = 25;
  /// Search range; defaults to the median nearest-neighbour distance and the
  /// diameter of the training locations.
  std::optional<double> bandwidth_min;
  std::optional<double> bandwidth_max;
  /// Skips the search.
  std::optional<double> bandwidth;
};

struct ModelSpec {
  ModelKind kind = ModelKind::nn;
  /// Display name; defaults to the kind.
  std::string name;
  /// Feature subset. Empty: all features, except for GWR and LDA-based
  /// models, which then exclude registered coordinate features.
  std::vector<std::string> features;
  ForestParams forest;
  GwrParams gwr;
  /// OK-RF blending distance d_max in meters.
  double blend_distance = 500.0;
  /// NN-LDA switch distance in meters.
  double switch_distance = 100.0;
  std::optional<LagLayout> lags;

  std::string label() const { return name.empty() ? to_string(kind) : name; }
};

/// Replacement value for one feature column.
struct FeatureOverride {
  Index feature = 0;
  double value = 0.0;
};

struct NamedOverride {
  std::string feature;
  double value = 0.0;
};

/// A trained predictor. Predictions are numeric values for regression and
/// class codes for classification. Immutable; predict is thread-safe.
class FittedModel {
 public:
  virtual ~FittedModel() = default;

  virtual ModelKind kind() const = 0;

  /// `features` is a full schema row (training dataset column order).
  virtual double predict(const Location& target,
                         std::span<const double> features) const = 0;

  /// Same as predict with some feature values replaced. When a registered
  /// coordinate feature is overridden the target location moves with it, so
  /// distance-aware models see the overridden coordinates.
  double predict_with_features(const Location& target,
                               std::span<const double> features,
                               std::span<const FeatureOverride> overrides) const;
  double predict_with_features(const Location& target,
                               std::span<const double> features,
                               std::span<const NamedOverride> overrides) const;

  /// Distance to the nearest retained training location.
  double nearest_training_distance(const Location& target) const;

  const std::vector<std::string>& feature_names() const { return schema_; }
  Index training_size() const { return train_coords_.rows(); }
  std::uint64_t seed() const { return seed_; }

  virtual nlohmann::json summary() const = 0;

 protected:
  FittedModel(const Dataset& train, std::uint64_t seed);

  std::vector<std::string> schema_;
  Dataset::CoordinateFeatures coord_features_;
  Coordinates train_coords_;
  std::shared_ptr<const KdTree> train_index_;
  std::uint64_t seed_;
};

/// Trains `spec` on `train`. Throws FitError for incompatible data (wrong
/// response kind, a class missing from training for LDA models) and
/// SchemaError for unknown features.
std::unique_ptr<FittedModel> fit(const ModelSpec& spec, const Dataset& train,
                                 std::uint64_t seed);

/// Predictions for every row of `ds`.
Eigen::VectorXd predict_all(const FittedModel& model, const Dataset& ds);

/// Columns of `spec.features` resolved against the schema, with the
/// kind-specific default when empty.
std::vector<Index> resolve_features(const ModelSpec& spec, const Dataset& ds);

// ---------------------------------------------------------------------------
// Concrete models whose internals are inspected by tests and reports.

class LinearModel final : public FittedModel {
 public:
  LinearModel(const Dataset& train, std::vector<Index> features,
              std::uint64_t seed);

  ModelKind kind() const override { return ModelKind::mlr; }
  double predict(const Location& target,
                 std::span<const double> features) const override;
  nlohmann::json summary() const override;

  /// Intercept first, then one coefficient per used feature.
  const Eigen::VectorXd& coefficients() const { return coef_; }
  const std::vector<Index>& used_features() const { return features_; }
  double r_squared() const { return r2_; }

 private:
  std::vector<Index> features_;
  Eigen::VectorXd coef_;
  double r2_ = 0.0;
};

class GwrModel final : public FittedModel {
 public:
  GwrModel(const Dataset& train, std::vector<Index> features,
           const GwrParams& params, std::uint64_t seed);

  ModelKind kind() const override { return ModelKind::gwr; }
  double predict(const Location& target,
                 std::span<const double> features) const override;
  nlohmann::json summary() const override;

  double bandwidth() const { return bandwidth_; }
  /// Local coefficients (intercept first) at a location.
  Eigen::VectorXd local_coefficients(const Location& at) const;

  /// Leave-one-out RMSE of a candidate bandwidth on the training data.
  double loo_rmse(double bandwidth) const;

 private:
  Eigen::VectorXd solve_local(const Location& at, double bandwidth,
                              Index skip) const;

  std::vector<Index> features_;
  Eigen::MatrixXd design_;  // [1, X]
  Eigen::VectorXd y_;
  double bandwidth_ = 0.0;
  std::vector<std::pair<double, double>> search_;  // (bandwidth, rmse)
};

}  // namespace spdiag
