#include "internal.hpp"

#include <algorithm>

namespace spdiag::detail {

namespace {

/// rho * RF + (1 - rho) * OK with rho = min(d / d_max, 1), d the distance
/// from the target to the nearest training location.
class OkRfModel final : public FittedModel {
 public:
  OkRfModel(const ModelSpec& spec, const Dataset& train, std::uint64_t seed)
      : FittedModel(train, seed), d_max_(spec.blend_distance) {
    ModelSpec ok = spec;
    ok.kind = ModelKind::ok;
    ModelSpec rf = spec;
    rf.kind = ModelKind::rf;
    ok_ = make_kriging(ok, train, seed);
    rf_ = make_forest(rf, train, seed);
  }

  ModelKind kind() const override { return ModelKind::ok_rf; }

  double predict(const Location& target,
                 std::span<const double> features) const override {
    const double rho =
        std::min(nearest_training_distance(target) / d_max_, 1.0);
    if (rho >= 1.0) return rf_->predict(target, features);
    if (rho <= 0.0) return ok_->predict(target, features);
    return rho * rf_->predict(target, features) +
           (1.0 - rho) * ok_->predict(target, features);
  }

  nlohmann::json summary() const override {
    return {{"kind", "OK_RF"},
            {"blend_distance", d_max_},
            {"ok", ok_->summary()},
            {"rf", rf_->summary()}};
  }

 private:
  double d_max_;
  std::unique_ptr<FittedModel> ok_;
  std::unique_ptr<FittedModel> rf_;
};

/// Nearest training label within the switch distance, LDA beyond it.
class NnLdaModel final : public FittedModel {
 public:
  NnLdaModel(const ModelSpec& spec, const Dataset& train, std::uint64_t seed)
      : FittedModel(train, seed),
        switch_(spec.switch_distance),
        labels_(train.response()) {
    ModelSpec lda = spec;
    lda.kind = ModelKind::lda;
    lda_ = make_lda(lda, train, seed);
  }

  ModelKind kind() const override { return ModelKind::nn_lda; }

  double predict(const Location& target,
                 std::span<const double> features) const override {
    const auto nb = train_index_->nearest(target);
    if (nb.distance <= switch_) return labels_[nb.index];
    return lda_->predict(target, features);
  }

  nlohmann::json summary() const override {
    return {{"kind", "NN_LDA"},
            {"switch_distance", switch_},
            {"lda", lda_->summary()}};
  }

 private:
  double switch_;
  Eigen::VectorXd labels_;
  std::unique_ptr<FittedModel> lda_;
};

}  // namespace

std::unique_ptr<FittedModel> make_ok_rf(const ModelSpec& spec,
                                        const Dataset& train,
                                        std::uint64_t seed) {
  return std::make_unique<OkRfModel>(spec, train, seed);
}

std::unique_ptr<FittedModel> make_nn_lda(const ModelSpec& spec,
                                         const Dataset& train,
                                         std::uint64_t seed) {
  return std::make_unique<NnLdaModel>(spec, train, seed);
}

}  // namespace spdiag::detail
