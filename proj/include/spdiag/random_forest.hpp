#pragma once

#include <spdiag/types.hpp>

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace spdiag {

/// Breiman random forest: bootstrap samples, CART trees grown on mtry
/// randomly chosen features per node, exhaustive numeric splits, variance
/// reduction (regression) or Gini impurity (classification). Regression
/// predictions average the trees; classification takes the majority vote
/// (ties to the lower class code).
class RandomForest {
 public:
  struct Options {
    int n_trees = 500;
    int mtry = 1;
    /// Nodes with at most this many samples become leaves.
    int min_node_size = 5;
    bool bootstrap = true;
    /// 0 for regression, otherwise the number of classes.
    int n_classes = 0;
  };

  RandomForest() = default;

  /// `x` is n x p; for classification `y` holds class codes.
  static RandomForest train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const Options& options, std::uint64_t seed);

  double predict(std::span<const double> row) const;

  int n_trees() const { return static_cast<int>(roots_.size()); }
  Index n_nodes() const { return static_cast<Index>(nodes_.size()); }
  const Options& options() const { return options_; }

  /// Bootstrap multiplicity of each training row for tree t.
  const std::vector<int>& in_bag(int tree) const { return in_bag_[tree]; }
  double tree_predict(int tree, std::span<const double> row) const;

 private:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  Options options_;
  std::vector<Node> nodes_;
  std::vector<int> roots_;
  std::vector<std::vector<int>> in_bag_;

  friend class TreeBuilder;
};

}  // namespace spdiag
