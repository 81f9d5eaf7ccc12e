#pragma once

#include <spdiag/types.hpp>

#include <Eigen/Core>
#include <span>

namespace spdiag {

/// Linear discriminant analysis with a pooled within-class covariance and
/// class-frequency priors. A near-singular covariance is regularized with a
/// ridge of 1e-8 * trace / p and the fact is reported by `ridged()`.
class LdaClassifier {
 public:
  LdaClassifier() = default;

  /// `labels` are class codes 0..n_classes-1; every class must occur.
  static LdaClassifier train(const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& labels, int n_classes);

  int predict(std::span<const double> row) const;
  Eigen::VectorXd discriminants(std::span<const double> row) const;

  int n_classes() const { return static_cast<int>(priors_.size()); }
  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::VectorXd& priors() const { return priors_; }
  bool ridged() const { return ridged_; }

 private:
  Eigen::MatrixXd means_;  // p x K
  Eigen::VectorXd priors_;
  Eigen::MatrixXd coef_;   // p x K: S^-1 mu_k
  Eigen::VectorXd offset_;  // -0.5 mu_k' S^-1 mu_k + log pi_k
  bool ridged_ = false;
};

}  // namespace spdiag
