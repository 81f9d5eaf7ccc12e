#include "internal.hpp"

#include <spdiag/errors.hpp>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

namespace spdiag {

namespace {

double median_nn_distance(const Dataset& ds) {
  std::vector<double> d = nearest_neighbour_distances(ds);
  std::sort(d.begin(), d.end());
  return quantile_sorted(d, 0.5);
}

double diameter(const Coordinates& c) {
  double best = 0.0;
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = i + 1; j < c.rows(); ++j) {
      best = std::max(best, (c.row(i) - c.row(j)).norm());
    }
  }
  return best;
}

}  // namespace

GwrModel::GwrModel(const Dataset& train, std::vector<Index> features,
                   const GwrParams& params, std::uint64_t seed)
    : FittedModel(train, seed), features_(std::move(features)) {
  const Index n = train.size();
  const Index k = static_cast<Index>(features_.size()) + 1;
  if (n <= k) throw FitError("GWR needs more observations than terms");
  design_.resize(n, k);
  design_.col(0).setOnes();
  design_.rightCols(k - 1) = detail::select_columns(train, features_);
  y_ = train.response();

  if (params.bandwidth) {
    if (!(*params.bandwidth > 0)) throw FitError("GWR bandwidth must be > 0");
    bandwidth_ = *params.bandwidth;
    return;
  }
  double lo = 0.0, hi = 0.0;
  try {
    lo = params.bandwidth_min ? *params.bandwidth_min : median_nn_distance(train);
  } catch (const GeometryError&) {
    throw FitError("GWR needs at least two distinct locations");
  }
  hi = params.bandwidth_max ? *params.bandwidth_max : diameter(train.coords());
  if (!(lo > 0) || !(hi >= lo)) throw FitError("invalid GWR bandwidth range");
  const int m = std::max(1, params.n_bandwidths);
  double best = std::numeric_limits<double>::infinity();
  bandwidth_ = hi;
  for (int g = 0; g < m; ++g) {
    const double b =
        m == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(g) / (m - 1));
    const double rmse = loo_rmse(b);
    search_.emplace_back(b, rmse);
    if (rmse < best) {
      best = rmse;
      bandwidth_ = b;
    }
  }
}

Eigen::VectorXd GwrModel::solve_local(const Location& at, double bandwidth,
                                      Index skip) const {
  const Index n = design_.rows();
  Eigen::VectorXd d2(n);
  double d2_min = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    const double dx = train_coords_(i, 0) - at.x;
    const double dy = train_coords_(i, 1) - at.y;
    d2[i] = dx * dx + dy * dy;
    if (i != skip) d2_min = std::min(d2_min, d2[i]);
  }
  // Gaussian kernel, rescaled so the closest point has weight 1
  const double inv = 0.5 / (bandwidth * bandwidth);
  const Index k = design_.cols();
  Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd xtwy = Eigen::VectorXd::Zero(k);
  for (Index i = 0; i < n; ++i) {
    if (i == skip) continue;
    const double w = std::exp(-(d2[i] - d2_min) * inv);
    if (w == 0.0) continue;
    xtwx.selfadjointView<Eigen::Lower>().rankUpdate(
        design_.row(i).transpose(), w);
    xtwy += w * y_[i] * design_.row(i).transpose();
  }
  xtwx = xtwx.selfadjointView<Eigen::Lower>();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtwx);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-12)) {
    throw NumericError("singular local GWR system");
  }
  return ldlt.solve(xtwy);
}

double GwrModel::loo_rmse(double bandwidth) const {
  double sse = 0.0;
  const Index n = design_.rows();
  try {
    for (Index i = 0; i < n; ++i) {
      const Eigen::VectorXd beta =
          solve_local(location_of(train_coords_, i), bandwidth, i);
      const double r = y_[i] - design_.row(i).dot(beta);
      sse += r * r;
    }
  } catch (const NumericError&) {
    return std::numeric_limits<double>::infinity();
  }
  return std::sqrt(sse / static_cast<double>(n));
}

Eigen::VectorXd GwrModel::local_coefficients(const Location& at) const {
  try {
    return solve_local(at, bandwidth_, -1);
  } catch (const NumericError&) {
    // kernel mass on too few points: fall back to the global fit
    return solve_local(at, std::numeric_limits<double>::max(), -1);
  }
}

double GwrModel::predict(const Location& target,
                         std::span<const double> features) const {
  const Eigen::VectorXd beta = local_coefficients(target);
  double v = beta[0];
  for (std::size_t j = 0; j < features_.size(); ++j) {
    v += beta[static_cast<Index>(j) + 1] * features[features_[j]];
  }
  return v;
}

nlohmann::json GwrModel::summary() const {
  auto search = nlohmann::json::array();
  for (const auto& [b, rmse] : search_) {
    search.push_back({{"bandwidth", b},
                      {"loo_rmse", std::isfinite(rmse) ? nlohmann::json(rmse)
                                                       : nlohmann::json()}});
  }
  return {{"kind", "GWR"},
          {"training_size", training_size()},
          {"features", detail::feature_list(schema_, features_)},
          {"kernel", "gaussian"},
          {"bandwidth", bandwidth_},
          {"search", search}};
}

}  // namespace spdiag
