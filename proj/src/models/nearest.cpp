#include "internal.hpp"

namespace spdiag::detail {

namespace {

// Response of the nearest training location (Euclidean, lower index on ties).
class NearestNeighbourModel final : public FittedModel {
 public:
  NearestNeighbourModel(const Dataset& train, std::uint64_t seed)
      : FittedModel(train, seed), response_(train.response()) {}

  ModelKind kind() const override { return ModelKind::nn; }

  double predict(const Location& target,
                 std::span<const double>) const override {
    return response_[train_index_->nearest(target).index];
  }

  nlohmann::json summary() const override {
    return {{"kind", "NN"}, {"training_size", training_size()}};
  }

 private:
  Eigen::VectorXd response_;
};

}  // namespace

std::unique_ptr<FittedModel> make_nn(const Dataset& train, std::uint64_t seed) {
  return std::make_unique<NearestNeighbourModel>(train, seed);
}

}  // namespace spdiag::detail
