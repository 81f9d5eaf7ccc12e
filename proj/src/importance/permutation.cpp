#include <spdiag/errors.hpp>
#include <spdiag/importance.hpp>

namespace spdiag {

std::vector<double> permuted_predictions(const FittedModel& model,
                                         const Location& target,
                                         std::span<const double> features,
                                         const PermutationChannel& channel,
                                         const Dataset& pool, int n_perm,
                                         std::mt19937_64& rng) {
  if (pool.size() < 1) throw ConfigError("empty permutation pool");
  std::uniform_int_distribution<Index> pick(0, pool.size() - 1);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n_perm, 0)));

  if (!channel.group) {
    if (channel.feature < 0 ||
        channel.feature >= static_cast<Index>(features.size())) {
      throw ConfigError("permutation channel '" + channel.name +
                        "' has no feature");
    }
    for (int j = 0; j < n_perm; ++j) {
      const FeatureOverride o{channel.feature,
                              pool.features()(pick(rng), channel.feature)};
      out.push_back(model.predict_with_features(
          target, features, std::span<const FeatureOverride>(&o, 1)));
    }
    return out;
  }

  const auto& g = *channel.group;
  const Eigen::VectorXd own = g.scores(features);
  std::vector<FeatureOverride> overrides(g.members.size());
  std::vector<double> pool_row(static_cast<std::size_t>(pool.num_features()));
  for (int j = 0; j < n_perm; ++j) {
    const Index u = pick(rng);
    for (Index c = 0; c < pool.num_features(); ++c) {
      pool_row[c] = pool.features()(u, c);
    }
    Eigen::VectorXd s = own;
    s[channel.component] = g.scores(pool_row)[channel.component];
    const Eigen::VectorXd values = g.back_transform(s);
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      overrides[m] = {g.members[m], values[static_cast<Index>(m)]};
    }
    out.push_back(model.predict_with_features(target, features, overrides));
  }
  return out;
}

}  // namespace spdiag
