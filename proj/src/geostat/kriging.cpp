#include <spdiag/errors.hpp>
#include <spdiag/kriging.hpp>

#include <cassert>
#include <cmath>
#include <string>

namespace spdiag {

namespace {

std::string singular_message(const Coordinates& c) {
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = i + 1; j < c.rows(); ++j) {
      if (c(i, 0) == c(j, 0) && c(i, 1) == c(j, 1)) {
        return "singular kriging system: observations " + std::to_string(i) +
               " and " + std::to_string(j) +
               " share a location and the measurement-error variance is 0";
      }
    }
  }
  return "kriging covariance matrix is not positive definite";
}

}  // namespace

KrigingSystem::KrigingSystem(Coordinates coords, Eigen::VectorXd values,
                             Eigen::MatrixXd trend, const Variogram& variogram)
    : coords_(std::move(coords)),
      values_(std::move(values)),
      trend_(std::move(trend)),
      variogram_(variogram) {
  const Index n = coords_.rows();
  if (n < 1 || values_.size() != n || trend_.rows() != n) {
    throw NumericError("kriging system dimensions do not match");
  }
  if (trend_.cols() > n) {
    throw NumericError("more trend terms than observations");
  }
  // unit-norm columns keep F' K^-1 F well scaled when an intercept sits next
  // to projected coordinates; the predictor only depends on the span of F
  trend_scale_ = Eigen::VectorXd::Ones(trend_.cols());
  for (Index j = 0; j < trend_.cols(); ++j) {
    const double norm = trend_.col(j).norm();
    if (norm > 0) trend_scale_[j] = 1.0 / norm;
  }
  trend_ = trend_ * trend_scale_.asDiagonal();

  Eigen::MatrixXd k(n, n);
  for (Index i = 0; i < n; ++i) {
    k(i, i) = variogram_.psill + variogram_.me_var;
    for (Index j = 0; j < i; ++j) {
      const double h = std::hypot(coords_(i, 0) - coords_(j, 0),
                                  coords_(i, 1) - coords_(j, 1));
      k(i, j) = k(j, i) = variogram_.covariance(h);
    }
  }
  chol_.compute(k);
  if (chol_.info() != Eigen::Success) {
    throw NumericError(singular_message(coords_));
  }
  // a duplicated location with me_var = 0 can slip through as a tiny pivot
  const Eigen::VectorXd diag = chol_.matrixLLT().diagonal();
  if (diag.minCoeff() <= 1e-7 * std::sqrt(k.diagonal().maxCoeff())) {
    throw NumericError(singular_message(coords_));
  }
  if (trend_.cols() > 0) {
    cinv_trend_ = chol_.solve(trend_);
    gls_.compute(trend_.transpose() * cinv_trend_);
    if (gls_.info() != Eigen::Success || !gls_.isPositive() ||
        gls_.vectorD().minCoeff() <= 1e-12 * gls_.vectorD().maxCoeff()) {
      throw NumericError("trend design is rank deficient");
    }
    beta_ = gls_.solve(cinv_trend_.transpose() * values_);
    alpha_ = chol_.solve(values_ - trend_ * beta_);
  } else {
    beta_.resize(0);
    alpha_ = chol_.solve(values_);
  }
}

KrigingSystem KrigingSystem::ordinary(Coordinates coords,
                                      Eigen::VectorXd values,
                                      const Variogram& variogram) {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(coords.rows(), 1);
  return KrigingSystem(std::move(coords), std::move(values), std::move(ones),
                       variogram);
}

Eigen::VectorXd KrigingSystem::target_covariance(const Location& t) const {
  const Index n = coords_.rows();
  Eigen::VectorXd c(n);
  for (Index i = 0; i < n; ++i) {
    c[i] = variogram_.covariance(
        std::hypot(coords_(i, 0) - t.x, coords_(i, 1) - t.y));
  }
  return c;
}

KrigingPrediction KrigingSystem::predict(const Location& target,
                                         const Eigen::VectorXd& trend_at) const {
  if (trend_at.size() != trend_.cols()) {
    throw NumericError("trend vector size does not match the system");
  }
  const Eigen::VectorXd c0 = target_covariance(target);
  const Eigen::VectorXd f0 = trend_at.cwiseProduct(trend_scale_);
  KrigingPrediction out;
  out.value = c0.dot(alpha_);
  if (trend_.cols() > 0) out.value += f0.dot(beta_);

  const Eigen::VectorXd cinv_c0 = chol_.solve(c0);
  double var = variogram_.psill - c0.dot(cinv_c0);
  if (trend_.cols() > 0) {
    const Eigen::VectorXd u = f0 - trend_.transpose() * cinv_c0;
    var += u.dot(gls_.solve(u));
  }
  out.variance = std::max(0.0, var);
#ifndef NDEBUG
  if (trend_.cols() == 1 && (trend_.array() == trend_(0, 0)).all()) {
    assert(std::abs(weights(target, trend_at).sum() - 1.0) < 1e-8);
  }
#endif
  return out;
}

KrigingPrediction KrigingSystem::predict(const Location& target) const {
  return predict(target, Eigen::VectorXd::Ones(1));
}

Eigen::VectorXd KrigingSystem::weights(const Location& target,
                                       const Eigen::VectorXd& trend_at) const {
  if (trend_at.size() != trend_.cols()) {
    throw NumericError("trend vector size does not match the system");
  }
  const Eigen::VectorXd c0 = target_covariance(target);
  Eigen::VectorXd w = chol_.solve(c0);
  if (trend_.cols() > 0) {
    const Eigen::VectorXd u =
        trend_at.cwiseProduct(trend_scale_) - trend_.transpose() * w;
    w += cinv_trend_ * gls_.solve(u);
  }
  return w;
}

}  // namespace spdiag
