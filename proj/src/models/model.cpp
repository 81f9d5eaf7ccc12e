#include "internal.hpp"

#include <spdiag/errors.hpp>

#include <algorithm>
#include <cctype>

namespace spdiag {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::nn: return "NN";
    case ModelKind::ok: return "OK";
    case ModelKind::ked: return "KED";
    case ModelKind::mlr: return "MLR";
    case ModelKind::gwr: return "GWR";
    case ModelKind::rf: return "RF";
    case ModelKind::ok_rf: return "OK_RF";
    case ModelKind::lda: return "LDA";
    case ModelKind::nn_lda: return "NN_LDA";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  std::string s;
  for (char c : name) {
    s += c == '-' ? '_' : static_cast<char>(std::toupper(
                              static_cast<unsigned char>(c)));
  }
  for (auto k : {ModelKind::nn, ModelKind::ok, ModelKind::ked, ModelKind::mlr,
                 ModelKind::gwr, ModelKind::rf, ModelKind::ok_rf,
                 ModelKind::lda, ModelKind::nn_lda}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown model kind '" + name + "'");
}

FittedModel::FittedModel(const Dataset& train, std::uint64_t seed)
    : schema_(train.feature_names()),
      coord_features_(train.coordinate_features()),
      train_coords_(train.coords()),
      train_index_(train.index_ptr()),
      seed_(seed) {}

double FittedModel::predict_with_features(
    const Location& target, std::span<const double> features,
    std::span<const FeatureOverride> overrides) const {
  if (overrides.empty()) return predict(target, features);
  std::vector<double> row(features.begin(), features.end());
  Location at = target;
  for (const auto& o : overrides) {
    if (o.feature < 0 || o.feature >= static_cast<Index>(row.size())) {
      throw SchemaError("override of an unknown feature column");
    }
    row[o.feature] = o.value;
    if (coord_features_.x && *coord_features_.x == o.feature) at.x = o.value;
    if (coord_features_.y && *coord_features_.y == o.feature) at.y = o.value;
  }
  return predict(at, row);
}

double FittedModel::predict_with_features(
    const Location& target, std::span<const double> features,
    std::span<const NamedOverride> overrides) const {
  std::vector<FeatureOverride> resolved;
  resolved.reserve(overrides.size());
  for (const auto& o : overrides) {
    auto it = std::find(schema_.begin(), schema_.end(), o.feature);
    if (it == schema_.end()) {
      throw SchemaError("unknown override feature '" + o.feature + "'");
    }
    resolved.push_back({static_cast<Index>(it - schema_.begin()), o.value});
  }
  return predict_with_features(target, features,
                               std::span<const FeatureOverride>(resolved));
}

double FittedModel::nearest_training_distance(const Location& target) const {
  return train_index_->nearest(target).distance;
}

std::vector<Index> resolve_features(const ModelSpec& spec, const Dataset& ds) {
  std::vector<Index> out;
  if (!spec.features.empty()) {
    for (const auto& f : spec.features) out.push_back(ds.feature_index(f));
    return out;
  }
  const bool geometry_only = spec.kind == ModelKind::gwr ||
                             spec.kind == ModelKind::lda ||
                             spec.kind == ModelKind::nn_lda;
  for (Index j = 0; j < ds.num_features(); ++j) {
    if (geometry_only && (ds.x_feature() == j || ds.y_feature() == j)) continue;
    out.push_back(j);
  }
  return out;
}

std::unique_ptr<FittedModel> fit(const ModelSpec& spec, const Dataset& train,
                                 std::uint64_t seed) {
  const bool regression = train.kind() == ResponseKind::regression;
  switch (spec.kind) {
    case ModelKind::ok:
    case ModelKind::ked:
    case ModelKind::mlr:
    case ModelKind::gwr:
    case ModelKind::ok_rf:
      if (!regression) {
        throw FitError(to_string(spec.kind) + " needs a numeric response");
      }
      break;
    case ModelKind::lda:
    case ModelKind::nn_lda:
      if (regression) {
        throw FitError(to_string(spec.kind) + " needs a class response");
      }
      break;
    default:
      break;
  }
  switch (spec.kind) {
    case ModelKind::nn: return detail::make_nn(train, seed);
    case ModelKind::ok:
    case ModelKind::ked: return detail::make_kriging(spec, train, seed);
    case ModelKind::mlr:
      return std::make_unique<LinearModel>(train, resolve_features(spec, train),
                                           seed);
    case ModelKind::gwr:
      return std::make_unique<GwrModel>(train, resolve_features(spec, train),
                                        spec.gwr, seed);
    case ModelKind::rf: return detail::make_forest(spec, train, seed);
    case ModelKind::ok_rf: return detail::make_ok_rf(spec, train, seed);
    case ModelKind::lda: return detail::make_lda(spec, train, seed);
    case ModelKind::nn_lda: return detail::make_nn_lda(spec, train, seed);
  }
  throw ConfigError("unsupported model kind");
}

Eigen::VectorXd predict_all(const FittedModel& model, const Dataset& ds) {
  Eigen::VectorXd out(ds.size());
  std::vector<double> row(static_cast<std::size_t>(ds.num_features()));
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index j = 0; j < ds.num_features(); ++j) row[j] = ds.features()(i, j);
    out[i] = model.predict(ds.location(i), row);
  }
  return out;
}

namespace detail {

Eigen::MatrixXd select_columns(const Dataset& ds,
                               const std::vector<Index>& features) {
  Eigen::MatrixXd x(ds.size(), static_cast<Index>(features.size()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    x.col(static_cast<Index>(j)) = ds.features().col(features[j]);
  }
  return x;
}

nlohmann::json feature_list(const std::vector<std::string>& schema,
                            const std::vector<Index>& features) {
  auto out = nlohmann::json::array();
  for (Index j : features) out.push_back(schema[j]);
  return out;
}

}  // namespace detail
}  // namespace spdiag
