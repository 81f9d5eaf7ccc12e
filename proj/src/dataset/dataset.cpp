#include <spdiag/dataset.hpp>
#include <spdiag/errors.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace spdiag {

Dataset::Dataset(std::vector<std::string> feature_names, Coordinates coords,
                 Eigen::MatrixXd features, Eigen::VectorXd response,
                 ResponseKind kind, std::vector<std::string> class_labels,
                 std::optional<std::vector<int>> groups,
                 CoordinateFeatures coordinate_features)
    : names_(std::move(feature_names)),
      coords_(std::move(coords)),
      features_(std::move(features)),
      response_(std::move(response)),
      kind_(kind),
      labels_(std::move(class_labels)),
      groups_(std::move(groups)),
      coord_features_(coordinate_features) {
  const Index n = coords_.rows();
  if (n < 1) throw SchemaError("dataset has no observations");
  if (features_.rows() != n || response_.size() != n) {
    throw SchemaError("coordinates, features and response differ in length");
  }
  if (static_cast<Index>(names_.size()) != features_.cols()) {
    throw SchemaError("feature matrix does not match the schema");
  }
  if (!coords_.allFinite()) throw SchemaError("non-finite coordinates");
  if (groups_ && static_cast<Index>(groups_->size()) != n) {
    throw SchemaError("group ids differ in length from the observations");
  }
  for (auto c : {coord_features_.x, coord_features_.y}) {
    if (c && (*c < 0 || *c >= features_.cols())) {
      throw SchemaError("coordinate feature column out of range");
    }
  }
  if (kind_ == ResponseKind::classification) {
    const double k = static_cast<double>(labels_.size());
    for (Index i = 0; i < n; ++i) {
      const double v = response_[i];
      if (v < 0 || v >= k || v != std::floor(v)) {
        throw SchemaError("class code outside the label set");
      }
    }
  }
  std::set<std::pair<double, double>> seen;
  for (Index i = 0; i < n && !duplicates_; ++i) {
    duplicates_ = !seen.emplace(coords_(i, 0), coords_(i, 1)).second;
  }
  tree_ = std::make_shared<const KdTree>(coords_);
}

Index Dataset::feature_index(const std::string& name) const {
  if (auto i = find_feature(name)) return *i;
  throw SchemaError("unknown feature '" + name + "'");
}

std::optional<Index> Dataset::find_feature(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Index>(it - names_.begin());
}

std::vector<double> Dataset::feature_row(Index i) const {
  std::vector<double> row(static_cast<std::size_t>(features_.cols()));
  for (Index j = 0; j < features_.cols(); ++j) row[j] = features_(i, j);
  return row;
}

const std::vector<int>& Dataset::groups() const {
  if (!groups_) throw SchemaError("dataset has no group column");
  return *groups_;
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  const Index m = static_cast<Index>(rows.size());
  Coordinates c(m, 2);
  Eigen::MatrixXd f(m, features_.cols());
  Eigen::VectorXd r(m);
  std::optional<std::vector<int>> g;
  if (groups_) g.emplace(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    const Index i = rows[k];
    c.row(k) = coords_.row(i);
    f.row(k) = features_.row(i);
    r[k] = response_[i];
    if (g) (*g)[k] = (*groups_)[i];
  }
  return Dataset(names_, std::move(c), std::move(f), std::move(r), kind_,
                 labels_, std::move(g), coord_features_);
}

}  // namespace spdiag
