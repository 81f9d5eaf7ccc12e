#include "internal.hpp"

#include <spdiag/errors.hpp>

#include <Eigen/QR>

namespace spdiag {

LinearModel::LinearModel(const Dataset& train, std::vector<Index> features,
                         std::uint64_t seed)
    : FittedModel(train, seed), features_(std::move(features)) {
  const Index n = train.size();
  const Index k = static_cast<Index>(features_.size()) + 1;
  if (n < k) throw FitError("MLR needs at least as many observations as terms");
  Eigen::MatrixXd x(n, k);
  x.col(0).setOnes();
  x.rightCols(k - 1) = detail::select_columns(train, features_);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) throw FitError("MLR design matrix is rank deficient");
  coef_ = qr.solve(train.response());
  const Eigen::VectorXd resid = train.response() - x * coef_;
  const double tss =
      (train.response().array() - train.response().mean()).square().sum();
  r2_ = tss > 0 ? 1.0 - resid.squaredNorm() / tss : 1.0;
}

double LinearModel::predict(const Location&,
                            std::span<const double> features) const {
  double v = coef_[0];
  for (std::size_t j = 0; j < features_.size(); ++j) {
    v += coef_[static_cast<Index>(j) + 1] * features[features_[j]];
  }
  return v;
}

nlohmann::json LinearModel::summary() const {
  return {{"kind", "MLR"},
          {"training_size", training_size()},
          {"features", detail::feature_list(schema_, features_)},
          {"coefficients", std::vector<double>(coef_.begin(), coef_.end())},
          {"r_squared", r2_}};
}

}  // namespace spdiag
