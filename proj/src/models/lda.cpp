#include "internal.hpp"

#include <spdiag/errors.hpp>
#include <spdiag/lda.hpp>
#include <spdiag/random_forest.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace spdiag {

LdaClassifier LdaClassifier::train(const Eigen::MatrixXd& x,
                                   const Eigen::VectorXd& labels,
                                   int n_classes) {
  const Index n = x.rows(), p = x.cols();
  if (n != labels.size() || n < 1) throw FitError("LDA: x and labels differ");
  if (n_classes < 2) throw FitError("LDA needs at least two classes");
  if (p < 1) throw FitError("LDA needs at least one feature");
  LdaClassifier lda;
  lda.means_ = Eigen::MatrixXd::Zero(p, n_classes);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes);
  for (Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(labels[i]);
    lda.means_.col(c) += x.row(i).transpose();
    counts[c] += 1.0;
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) {
      throw FitError("LDA: class " + std::to_string(c) +
                     " is absent from the training data");
    }
    lda.means_.col(c) /= counts[c];
  }
  lda.priors_ = counts / static_cast<double>(n);

  Eigen::MatrixXd centred(n, p);
  for (Index i = 0; i < n; ++i) {
    centred.row(i) = x.row(i) - lda.means_.col(static_cast<int>(labels[i])).transpose();
  }
  const double dof = static_cast<double>(std::max<Index>(1, n - n_classes));
  Eigen::MatrixXd s = centred.transpose() * centred / dof;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0) || lmin <= 1e-10 * lmax) {
    const double trace = s.trace();
    const double eps = 1e-8 * (trace > 0 ? trace : 1.0) / static_cast<double>(p);
    s.diagonal().array() += eps;
    lda.ridged_ = true;
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  if (ldlt.info() != Eigen::Success) throw FitError("LDA covariance failed");
  lda.coef_ = ldlt.solve(lda.means_);
  lda.offset_.resize(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    lda.offset_[c] = -0.5 * lda.means_.col(c).dot(lda.coef_.col(c)) +
                     std::log(lda.priors_[c]);
  }
  return lda;
}

Eigen::VectorXd LdaClassifier::discriminants(std::span<const double> row) const {
  const Eigen::Map<const Eigen::VectorXd> v(row.data(),
                                            static_cast<Index>(row.size()));
  return coef_.transpose() * v + offset_;
}

int LdaClassifier::predict(std::span<const double> row) const {
  Eigen::Index best = 0;
  discriminants(row).maxCoeff(&best);
  return static_cast<int>(best);
}

namespace detail {

namespace {

class ForestModel final : public FittedModel {
 public:
  ForestModel(const ModelSpec& spec, const Dataset& train, std::uint64_t seed)
      : FittedModel(train, seed), features_(resolve_features(spec, train)) {
    const bool classify = train.kind() == ResponseKind::classification;
    const int p = static_cast<int>(features_.size());
    RandomForest::Options opt;
    opt.n_trees = spec.forest.n_trees;
    opt.n_classes = classify ? train.num_classes() : 0;
    opt.mtry = spec.forest.mtry.value_or(
        classify ? std::max(1, static_cast<int>(std::floor(std::sqrt(p))))
                 : std::max(1, p / 3));
    opt.min_node_size = spec.forest.min_node_size.value_or(classify ? 1 : 5);
    opt.bootstrap = spec.forest.bootstrap;
    forest_ = RandomForest::train(select_columns(train, features_),
                                  train.response(), opt, seed);
  }

  ModelKind kind() const override { return ModelKind::rf; }

  double predict(const Location&,
                 std::span<const double> features) const override {
    double buf[32];
    std::vector<double> heap;
    double* row = buf;
    if (features_.size() > 32) {
      heap.resize(features_.size());
      row = heap.data();
    }
    for (std::size_t j = 0; j < features_.size(); ++j) {
      row[j] = features[features_[j]];
    }
    return forest_.predict({row, features_.size()});
  }

  nlohmann::json summary() const override {
    const auto& o = forest_.options();
    return {{"kind", "RF"},
            {"training_size", training_size()},
            {"features", feature_list(schema_, features_)},
            {"trees", o.n_trees},
            {"mtry", o.mtry},
            {"min_node_size", o.min_node_size},
            {"nodes", forest_.n_nodes()}};
  }

 private:
  std::vector<Index> features_;
  RandomForest forest_;
};

class LdaModel final : public FittedModel {
 public:
  LdaModel(const ModelSpec& spec, const Dataset& train, std::uint64_t seed)
      : FittedModel(train, seed),
        features_(resolve_features(spec, train)),
        lda_(LdaClassifier::train(select_columns(train, features_),
                                  train.response(), train.num_classes())) {}

  ModelKind kind() const override { return ModelKind::lda; }

  double predict(const Location&,
                 std::span<const double> features) const override {
    std::vector<double> row(features_.size());
    for (std::size_t j = 0; j < features_.size(); ++j) {
      row[j] = features[features_[j]];
    }
    return lda_.predict(row);
  }

  nlohmann::json summary() const override {
    return {{"kind", "LDA"},
            {"training_size", training_size()},
            {"features", feature_list(schema_, features_)},
            {"priors", std::vector<double>(lda_.priors().begin(),
                                           lda_.priors().end())},
            {"ridged", lda_.ridged()}};
  }

 private:
  std::vector<Index> features_;
  LdaClassifier lda_;
};

}  // namespace

std::unique_ptr<FittedModel> make_forest(const ModelSpec& spec,
                                         const Dataset& train,
                                         std::uint64_t seed) {
  return std::make_unique<ForestModel>(spec, train, seed);
}

std::unique_ptr<FittedModel> make_lda(const ModelSpec& spec,
                                      const Dataset& train,
                                      std::uint64_t seed) {
  return std::make_unique<LdaModel>(spec, train, seed);
}

}  // namespace detail
}  // namespace spdiag
