#pragma once

#include <spdiag/types.hpp>
#include <spdiag/variogram.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace spdiag {

struct KrigingPrediction {
  double value = 0.0;
  double variance = 0.0;
};

/// Universal kriging system with a linear trend in the columns of `trend`
/// (ordinary kriging: a single column of ones).
///
/// The data covariance is C(h_ij) + me_var * delta_ij with C the covariance of
/// the correlated part; the target covariance vector omits me_var, so the
/// predictor estimates the noise-free signal. The factorization is computed
/// once and reused for every target.
class KrigingSystem {
 public:
  KrigingSystem(Coordinates coords, Eigen::VectorXd values,
                Eigen::MatrixXd trend, const Variogram& variogram);

  static KrigingSystem ordinary(Coordinates coords, Eigen::VectorXd values,
                                const Variogram& variogram);

  Index size() const { return coords_.rows(); }
  Index trend_size() const { return trend_.cols(); }
  const Variogram& variogram() const { return variogram_; }
  /// Generalized least-squares trend coefficients.
  Eigen::VectorXd trend_coefficients() const {
    return beta_.cwiseProduct(trend_scale_);
  }

  /// `trend_at` holds the trend regressors at the target (size trend_size()).
  KrigingPrediction predict(const Location& target,
                            const Eigen::VectorXd& trend_at) const;
  /// Ordinary-kriging shorthand (trend_at = [1]).
  KrigingPrediction predict(const Location& target) const;

  /// Kriging weights on the training values.
  Eigen::VectorXd weights(const Location& target,
                          const Eigen::VectorXd& trend_at) const;

 private:
  Eigen::VectorXd target_covariance(const Location& target) const;

  Coordinates coords_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd trend_;             // columns scaled to unit norm
  Eigen::VectorXd trend_scale_;
  Variogram variogram_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd cinv_trend_;       // K^-1 F
  Eigen::LDLT<Eigen::MatrixXd> gls_;  // F' K^-1 F
  Eigen::VectorXd beta_;
  Eigen::VectorXd alpha_;  // K^-1 (z - F beta)
};

}  // namespace spdiag
