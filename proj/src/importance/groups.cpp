#include <spdiag/errors.hpp>
#include <spdiag/importance.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace spdiag {

Eigen::VectorXd FeatureGroup::scores(std::span<const double> row) const {
  const auto k = static_cast<Index>(members.size());
  Eigen::VectorXd z(k);
  for (Index j = 0; j < k; ++j) {
    z[j] = (row[members[j]] - center[j]) / scale[j];
  }
  return loadings.transpose() * z;
}

Eigen::VectorXd FeatureGroup::back_transform(const Eigen::VectorXd& s) const {
  return center + scale.cwiseProduct(loadings * s);
}

std::vector<FeatureGroup> fit_pc_groups(
    const Dataset& ds, std::span<const GroupDefinition> groups) {
  std::set<Index> seen;
  std::vector<FeatureGroup> out;
  const double n = static_cast<double>(ds.size());
  if (ds.size() < 2) throw ConfigError("PC groups need at least two rows");
  for (const auto& def : groups) {
    if (def.members.size() < 2) {
      throw ConfigError("group '" + def.name + "' needs at least two members");
    }
    FeatureGroup g;
    g.name = def.name;
    std::vector<double> centers, scales;
    for (const auto& name : def.members) {
      const Index c = ds.feature_index(name);
      if (!seen.insert(c).second) {
        throw ConfigError("feature '" + name + "' is in more than one group");
      }
      const auto col = ds.features().col(c);
      const double mean = col.mean();
      const double sd =
          std::sqrt((col.array() - mean).square().sum() / (n - 1.0));
      if (!(sd > 0.0)) {
        g.dropped.push_back(name);
        continue;
      }
      g.members.push_back(c);
      centers.push_back(mean);
      scales.push_back(sd);
    }
    const auto k = static_cast<Index>(g.members.size());
    if (k == 0) {
      throw ConfigError("group '" + def.name + "' has no varying member");
    }
    g.center = Eigen::Map<Eigen::VectorXd>(centers.data(), k);
    g.scale = Eigen::Map<Eigen::VectorXd>(scales.data(), k);

    Eigen::MatrixXd z(ds.size(), k);
    for (Index j = 0; j < k; ++j) {
      z.col(j) = (ds.features().col(g.members[j]).array() - g.center[j]) /
                 g.scale[j];
    }
    const Eigen::MatrixXd corr = z.transpose() * z / (n - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    if (eig.info() != Eigen::Success) {
      throw NumericError("eigendecomposition failed for group " + def.name);
    }
    // Eigen returns ascending eigenvalues; reverse and fix signs so the
    // largest-magnitude loading of each component is positive.
    g.loadings.resize(k, k);
    g.explained_variance.resize(k);
    for (Index c = 0; c < k; ++c) {
      Eigen::VectorXd v = eig.eigenvectors().col(k - 1 - c);
      Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      if (v[arg] < 0) v = -v;
      g.loadings.col(c) = v;
      g.explained_variance[c] = std::max(0.0, eig.eigenvalues()[k - 1 - c]);
    }
    out.push_back(std::move(g));
  }
  return out;
}

PermutationChannel PermutationChannel::for_feature(const Dataset& ds,
                                                   const std::string& feature) {
  PermutationChannel ch;
  ch.name = feature;
  ch.feature = ds.feature_index(feature);
  return ch;
}

PermutationChannel PermutationChannel::for_component(
    std::shared_ptr<const FeatureGroup> group, Index component) {
  if (!group || component < 0 ||
      component >= static_cast<Index>(group->members.size())) {
    throw ConfigError("PC component out of range");
  }
  PermutationChannel ch;
  ch.name = group->name + std::to_string(component + 1);
  ch.group = std::move(group);
  ch.component = component;
  return ch;
}

}  // namespace spdiag
