#include <spdiag/comparators.hpp>
#include <spdiag/errors.hpp>
#include <spdiag/parallel.hpp>

#include <algorithm>
#include <numeric>
#include <map>
#include <set>

namespace spdiag {

std::string to_string(CvKind kind) {
  switch (kind) {
    case CvKind::resubstitution: return "resubstitution";
    case CvKind::loo: return "loo";
    case CvKind::random_kfold: return "random_kfold";
    case CvKind::kmeans_spatial: return "kmeans_spatial";
    case CvKind::field_level: return "field_level";
  }
  return "unknown";
}

CvKind parse_cv_kind(const std::string& name) {
  for (auto k : {CvKind::resubstitution, CvKind::loo, CvKind::random_kfold,
                 CvKind::kmeans_spatial, CvKind::field_level}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown CV kind '" + name + "'");
}

int CvScheme::effective_repetitions() const {
  if (kind == CvKind::resubstitution || kind == CvKind::loo) return 1;
  return repetitions;
}

namespace {

bool uses_groups(const CvScheme& s) {
  return s.kind == CvKind::field_level ||
         (s.kind == CvKind::random_kfold && s.by_group);
}

Index distinct_groups(const Dataset& ds) {
  return static_cast<Index>(
      std::set<int>(ds.groups().begin(), ds.groups().end()).size());
}

FoldSet draw_folds(const Dataset& ds, const CvScheme& s,
                   std::mt19937_64& rng) {
  const Index n = ds.size();
  FoldSet folds(static_cast<std::size_t>(s.k));
  if (s.kind == CvKind::kmeans_spatial) {
    const auto km = kmeans(ds.coords(), s.k, 10, rng);
    for (Index i = 0; i < n; ++i) folds[km.assignment[i]].push_back(i);
  } else if (uses_groups(s)) {
    std::vector<int> ids(ds.groups());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    std::map<int, int> fold_of;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      fold_of[ids[j]] = static_cast<int>(j % static_cast<std::size_t>(s.k));
    }
    for (Index i = 0; i < n; ++i) folds[fold_of[ds.groups()[i]]].push_back(i);
  } else {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Index j = 0; j < n; ++j) folds[j % s.k].push_back(perm[j]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
  }
  folds.erase(std::remove_if(folds.begin(), folds.end(),
                             [](const auto& f) { return f.empty(); }),
              folds.end());
  return folds;
}

bool training_has_all_classes(const Dataset& ds, const FoldSet& folds) {
  const int K = ds.num_classes();
  std::vector<Index> total(K, 0);
  for (Index i = 0; i < ds.size(); ++i) {
    ++total[static_cast<int>(ds.response()[i])];
  }
  for (const auto& f : folds) {
    std::vector<Index> test(K, 0);
    for (Index i : f) ++test[static_cast<int>(ds.response()[i])];
    for (int c = 0; c < K; ++c) {
      if (total[c] - test[c] == 0) return false;
    }
  }
  return true;
}

std::vector<Index> complement(Index n, const std::vector<Index>& test) {
  std::vector<char> in_test(static_cast<std::size_t>(n), 0);
  for (Index i : test) in_test[i] = 1;
  std::vector<Index> train;
  train.reserve(static_cast<std::size_t>(n) - test.size());
  for (Index i = 0; i < n; ++i) {
    if (!in_test[i]) train.push_back(i);
  }
  return train;
}

}  // namespace

void CvScheme::validate(const Dataset& ds) const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (kind == CvKind::resubstitution || kind == CvKind::loo) return;
  if (k < 2) throw ConfigError("k must be at least 2 for " + to_string(kind));
  if (uses_groups(*this)) {
    if (!ds.has_groups()) {
      throw ConfigError(to_string(kind) + " needs group ids");
    }
    if (k > distinct_groups(ds)) {
      throw ConfigError("k exceeds the number of groups");
    }
  } else if (k > ds.size()) {
    throw ConfigError("k exceeds the number of observations");
  }
}

std::vector<FoldSet> make_folds(const Dataset& ds, const CvScheme& scheme,
                                Index* redraws) {
  scheme.validate(ds);
  const Index n = ds.size();
  std::vector<FoldSet> out;
  Index redrawn = 0;
  if (scheme.kind == CvKind::resubstitution) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    out.push_back({all});
  } else if (scheme.kind == CvKind::loo) {
    FoldSet f;
    for (Index i = 0; i < n; ++i) f.push_back({i});
    out.push_back(std::move(f));
  } else {
    const bool classify = ds.kind() == ResponseKind::classification;
    for (int rep = 0; rep < scheme.effective_repetitions(); ++rep) {
      std::mt19937_64 rng(mix_seed(scheme.seed, static_cast<std::uint64_t>(rep)));
      FoldSet f = draw_folds(ds, scheme, rng);
      int attempts = 0;
      while (classify && !training_has_all_classes(ds, f)) {
        if (++attempts > 10) {
          throw FitError("folds keep leaving a class out of training");
        }
        ++redrawn;
        f = draw_folds(ds, scheme, rng);
      }
      out.push_back(std::move(f));
    }
  }
  if (redraws) *redraws = redrawn;
  return out;
}

std::vector<double> cv_prediction_distances(const Dataset& ds,
                                            const std::vector<FoldSet>& folds,
                                            bool resubstitution) {
  std::vector<double> out;
  for (const auto& rep : folds) {
    for (const auto& test : rep) {
      if (resubstitution) {
        out.insert(out.end(), test.size(), 0.0);
        continue;
      }
      const auto train = complement(ds.size(), test);
      if (train.empty()) throw GeometryError("fold leaves no training data");
      Coordinates c(static_cast<Index>(train.size()), 2);
      for (std::size_t j = 0; j < train.size(); ++j) {
        c.row(static_cast<Index>(j)) = ds.coords().row(train[j]);
      }
      const KdTree tree(c);
      for (Index i : test) out.push_back(tree.nearest(ds.location(i)).distance);
    }
  }
  return out;
}

CvResult run_cv(const Dataset& ds, const ModelSpec& spec,
                const CvScheme& scheme, ErrorMeasure measure,
                const HistogramSpec& hist) {
  CvResult res;
  res.scheme = scheme;
  res.model = spec.label();
  const auto folds = make_folds(ds, scheme, &res.redraws);
  const bool resub = scheme.kind == CvKind::resubstitution;

  struct Task {
    std::size_t rep;
    std::size_t fold;
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < folds.size(); ++r) {
    for (std::size_t f = 0; f < folds[r].size(); ++f) tasks.push_back({r, f});
  }
  std::vector<Eigen::VectorXd> pred(folds.size(),
                                    Eigen::VectorXd::Zero(ds.size()));
  parallel_for(tasks.size(), resolve_threads(0), [&](std::size_t t) {
    const auto& test = folds[tasks[t].rep][tasks[t].fold];
    const auto train = resub ? test : complement(ds.size(), test);
    const std::uint64_t seed =
        mix_seed(mix_seed(scheme.seed, tasks[t].rep), tasks[t].fold + 1);
    const auto model = fit(spec, ds.subset(train), seed);
    for (Index i : test) {
      pred[tasks[t].rep][i] = model->predict(ds.location(i), ds.feature_row(i));
    }
  });

  const auto& y = ds.response();
  for (const auto& p : pred) {
    res.per_repetition.push_back(error_measure(
        {y.data(), static_cast<std::size_t>(y.size())},
        {p.data(), static_cast<std::size_t>(p.size())}, measure));
  }
  res.estimate = std::accumulate(res.per_repetition.begin(),
                                 res.per_repetition.end(), 0.0) /
                 static_cast<double>(res.per_repetition.size());
  res.distances = cv_prediction_distances(ds, folds, resub);
  res.distance_summary = summarize_distances(res.distances, hist);
  res.mean_distance = res.distance_summary.mean;
  return res;
}

DistanceSummary cv_distance_report(const CvResult& result,
                                   const HistogramSpec& hist) {
  return summarize_distances(result.distances, hist);
}

}  // namespace spdiag
