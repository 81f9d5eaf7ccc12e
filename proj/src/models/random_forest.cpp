#include <spdiag/errors.hpp>
#include <spdiag/random_forest.hpp>

#include <algorithm>
#include <numeric>
#include <random>

namespace spdiag {

class TreeBuilder {
 public:
  TreeBuilder(RandomForest& forest, const Eigen::MatrixXd& x,
              const Eigen::VectorXd& y, std::mt19937_64& rng)
      : forest_(forest),
        opt_(forest.options_),
        x_(x),
        y_(y),
        rng_(rng),
        features_(static_cast<std::size_t>(x.cols())),
        counts_left_(static_cast<std::size_t>(std::max(1, opt_.n_classes))),
        counts_total_(counts_left_.size()) {
    std::iota(features_.begin(), features_.end(), 0);
    if (opt_.n_classes > 0) {
      labels_.resize(static_cast<std::size_t>(y.size()));
      for (Index i = 0; i < y.size(); ++i) labels_[i] = static_cast<int>(y[i]);
    }
  }

  void grow() {
    const Index n = x_.rows();
    std::vector<int> bag(static_cast<std::size_t>(n), 0);
    sample_.resize(static_cast<std::size_t>(n));
    if (opt_.bootstrap) {
      std::uniform_int_distribution<Index> pick(0, n - 1);
      for (auto& s : sample_) {
        s = pick(rng_);
        ++bag[s];
      }
    } else {
      std::iota(sample_.begin(), sample_.end(), Index{0});
      std::fill(bag.begin(), bag.end(), 1);
    }
    forest_.in_bag_.push_back(std::move(bag));
    forest_.roots_.push_back(build(0, n));
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
  };

  int build(Index begin, Index end) {
    const int id = static_cast<int>(forest_.nodes_.size());
    forest_.nodes_.push_back({});
    const Index size = end - begin;
    const double value = leaf_value(begin, end);
    bool pure = true;
    for (Index k = begin + 1; k < end && pure; ++k) {
      pure = y_[sample_[k]] == y_[sample_[begin]];
    }
    Split split;
    if (size > opt_.min_node_size && !pure) split = best_split(begin, end);
    if (split.feature < 0) {
      forest_.nodes_[id].value = value;
      return id;
    }
    auto mid = std::partition(
        sample_.begin() + begin, sample_.begin() + end, [&](Index i) {
          return x_(i, split.feature) <= split.threshold;
        });
    const Index m = static_cast<Index>(mid - sample_.begin());
    const int left = build(begin, m);
    const int right = build(m, end);
    auto& node = forest_.nodes_[id];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    node.value = value;
    return id;
  }

  double leaf_value(Index begin, Index end) const {
    if (opt_.n_classes == 0) {
      double s = 0.0;
      for (Index k = begin; k < end; ++k) s += y_[sample_[k]];
      return s / static_cast<double>(end - begin);
    }
    std::vector<Index> counts(static_cast<std::size_t>(opt_.n_classes), 0);
    for (Index k = begin; k < end; ++k) ++counts[labels_[sample_[k]]];
    return static_cast<double>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  Split best_split(Index begin, Index end) {
    const Index size = end - begin;
    const int p = static_cast<int>(features_.size());
    const int mtry = std::clamp(opt_.mtry, 1, p);
    // partial Fisher-Yates draw of mtry candidate features
    for (int j = 0; j < mtry; ++j) {
      std::uniform_int_distribution<int> pick(j, p - 1);
      std::swap(features_[j], features_[pick(rng_)]);
    }
    Split best;
    const double parent = parent_score(begin, end);
    best.score = parent + 1e-12 * std::max(1.0, std::abs(parent));
    order_.resize(static_cast<std::size_t>(size));
    for (int j = 0; j < mtry; ++j) {
      const int f = features_[j];
      for (Index k = 0; k < size; ++k) order_[k] = {x_(sample_[begin + k], f), sample_[begin + k]};
      std::sort(order_.begin(), order_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (order_.front().first == order_.back().first) continue;
      if (opt_.n_classes == 0) {
        scan_regression(f, best);
      } else {
        scan_classification(f, best);
      }
    }
    return best.feature >= 0 ? best : Split{};
  }

  // Score to maximize: sum_L^2 / n_L + sum_R^2 / n_R (variance reduction) or
  // sum_c n_Lc^2 / n_L + sum_c n_Rc^2 / n_R (Gini). Parent score is the
  // unsplit value of the same expression.
  double parent_score(Index begin, Index end) const {
    const double n = static_cast<double>(end - begin);
    if (opt_.n_classes == 0) {
      double s = 0.0;
      for (Index k = begin; k < end; ++k) s += y_[sample_[k]];
      return s * s / n;
    }
    std::vector<double> c(static_cast<std::size_t>(opt_.n_classes), 0.0);
    for (Index k = begin; k < end; ++k) c[labels_[sample_[k]]] += 1.0;
    double s = 0.0;
    for (double v : c) s += v * v;
    return s / n;
  }

  void consider(int f, std::size_t k, double score, Split& best) const {
    if (score <= best.score) return;
    const double a = order_[k].first, b = order_[k + 1].first;
    double t = 0.5 * (a + b);
    if (!(t < b)) t = a;
    best = {f, t, score};
  }

  void scan_regression(int f, Split& best) const {
    const std::size_t m = order_.size();
    double total = 0.0;
    for (const auto& o : order_) total += y_[o.second];
    double left = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      left += y_[order_[k].second];
      if (order_[k].first == order_[k + 1].first) continue;
      const double nl = static_cast<double>(k + 1);
      const double nr = static_cast<double>(m - k - 1);
      const double right = total - left;
      consider(f, k, left * left / nl + right * right / nr, best);
    }
  }

  void scan_classification(int f, Split& best) {
    const std::size_t m = order_.size();
    std::fill(counts_left_.begin(), counts_left_.end(), 0.0);
    std::fill(counts_total_.begin(), counts_total_.end(), 0.0);
    for (const auto& o : order_) counts_total_[labels_[o.second]] += 1.0;
    double sq_left = 0.0, sq_right = 0.0;
    for (double c : counts_total_) sq_right += c * c;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const int c = labels_[order_[k].second];
      const double l = counts_left_[c], r = counts_total_[c] - l;
      sq_left += 2.0 * l + 1.0;   // (l+1)^2 - l^2
      sq_right -= 2.0 * r - 1.0;  // (r-1)^2 - r^2
      counts_left_[c] = l + 1.0;
      if (order_[k].first == order_[k + 1].first) continue;
      const double nl = static_cast<double>(k + 1);
      const double nr = static_cast<double>(m - k - 1);
      consider(f, k, sq_left / nl + sq_right / nr, best);
    }
  }

  RandomForest& forest_;
  const RandomForest::Options& opt_;
  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  std::mt19937_64& rng_;
  std::vector<int> features_;
  std::vector<int> labels_;
  std::vector<Index> sample_;
  std::vector<std::pair<double, Index>> order_;
  std::vector<double> counts_left_;
  std::vector<double> counts_total_;
};

RandomForest RandomForest::train(const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y,
                                 const Options& options, std::uint64_t seed) {
  if (x.rows() < 1 || x.rows() != y.size()) {
    throw FitError("random forest needs matching, non-empty x and y");
  }
  if (x.cols() < 1) throw FitError("random forest needs at least one feature");
  if (options.n_trees < 1) throw FitError("random forest needs >= 1 tree");
  if (options.n_classes > 0) {
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] < 0 || y[i] >= options.n_classes) {
        throw FitError("class code out of range");
      }
    }
  }
  RandomForest forest;
  forest.options_ = options;
  forest.options_.min_node_size = std::max(1, options.min_node_size);
  forest.nodes_.reserve(static_cast<std::size_t>(options.n_trees) *
                        static_cast<std::size_t>(x.rows()));
  std::mt19937_64 rng(seed);
  TreeBuilder builder(forest, x, y, rng);
  for (int t = 0; t < options.n_trees; ++t) builder.grow();
  return forest;
}

double RandomForest::tree_predict(int tree, std::span<const double> row) const {
  int id = roots_[tree];
  while (nodes_[id].feature >= 0) {
    const Node& node = nodes_[id];
    id = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].value;
}

double RandomForest::predict(std::span<const double> row) const {
  const int t_count = n_trees();
  if (options_.n_classes == 0) {
    double s = 0.0;
    for (int t = 0; t < t_count; ++t) s += tree_predict(t, row);
    return s / t_count;
  }
  std::vector<int> votes(static_cast<std::size_t>(options_.n_classes), 0);
  for (int t = 0; t < t_count; ++t) {
    ++votes[static_cast<std::size_t>(tree_predict(t, row))];
  }
  return static_cast<double>(std::max_element(votes.begin(), votes.end()) -
                             votes.begin());
}

}  // namespace spdiag
