#include <spdiag/dataset.hpp>
#include <spdiag/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spdiag {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EstimationError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistanceSummary summarize_distances(std::span<const double> distances,
                                    const HistogramSpec& spec) {
  if (distances.empty()) throw EstimationError("no distances to summarize");
  std::vector<double> s(distances.begin(), distances.end());
  std::sort(s.begin(), s.end());
  DistanceSummary out;
  out.count = static_cast<Index>(s.size());
  out.mean = std::accumulate(s.begin(), s.end(), 0.0) /
             static_cast<double>(s.size());
  out.min = s.front();
  out.max = s.back();
  out.q1 = quantile_sorted(s, 0.25);
  out.median = quantile_sorted(s, 0.5);
  out.q3 = quantile_sorted(s, 0.75);

  auto& h = out.histogram;
  double width = 0.0;
  int bins = 0;
  if (spec.bin_width) {
    if (!(*spec.bin_width > 0)) throw ParameterError("bin width must be > 0");
    width = *spec.bin_width;
    bins = std::max(1, static_cast<int>(std::floor(out.max / width)) + 1);
  } else {
    if (spec.n_bins < 1) throw ParameterError("histogram needs >= 1 bin");
    bins = spec.n_bins;
    width = out.max > 0 ? out.max / bins : 1.0;
  }
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = width * b;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double d : s) {
    auto b = static_cast<int>(std::floor(d / width));
    h.counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
  }
  return out;
}

std::vector<double> nearest_neighbour_distances(const Dataset& ds) {
  const Index n = ds.size();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto nb = ds.index().nearest_if(
        ds.location(i), [](Index, double d) { return d > 0.0; });
    if (!nb) {
      throw GeometryError("all observations share one location");
    }
    out[i] = nb->distance;
  }
  return out;
}

DistanceSummary nn_distance_stats(const Dataset& ds,
                                  const HistogramSpec& spec) {
  if (ds.size() < 2) throw GeometryError("need at least 2 observations");
  const auto d = nearest_neighbour_distances(ds);
  return summarize_distances(d, spec);
}

std::vector<double> prediction_distances(const Dataset& train,
                                         std::span<const Location> targets) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.push_back(train.index().nearest(t).distance);
  return out;
}

DistanceSummary prediction_distance_distribution(
    const Dataset& train, std::span<const Location> targets,
    const HistogramSpec& spec) {
  if (targets.empty()) throw EstimationError("no prediction targets");
  const auto d = prediction_distances(train, targets);
  return summarize_distances(d, spec);
}

BufferSplit buffer_exclude(const Dataset& ds, Index i, double r) {
  const Index n = ds.size();
  if (i < 0 || i >= n) throw ParameterError("target index out of range");
  const Location target = ds.location(i);
  BufferSplit split;
  if (r < 0) {
    split.train.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j != i) split.train.push_back(j);
    }
    if (split.train.empty()) {
      throw ExhaustedBufferError("no training observations left");
    }
    split.d_actual = ds.index()
                         .nearest_if(target,
                                     [i](Index j, double) { return j != i; })
                         ->distance;
    return split;
  }
  const auto excluded = ds.index().within(target, r);
  if (static_cast<Index>(excluded.size()) >= n) {
    throw ExhaustedBufferError("buffer of " + std::to_string(r) +
                               " m excludes every observation");
  }
  split.train.reserve(static_cast<std::size_t>(n) - excluded.size());
  auto ex = excluded.begin();
  for (Index j = 0; j < n; ++j) {
    if (ex != excluded.end() && *ex == j) {
      ++ex;
      continue;
    }
    split.train.push_back(j);
  }
  split.d_actual =
      ds.index()
          .nearest_if(target, [r](Index, double d) { return d > r; })
          ->distance;
  return split;
}

}  // namespace spdiag
