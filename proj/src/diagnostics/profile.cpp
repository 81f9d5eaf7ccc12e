#include <spdiag/dataset.hpp>
#include <spdiag/errors.hpp>
#include <spdiag/profile.hpp>

#include <algorithm>
#include <cmath>

namespace spdiag {

std::string to_string(ErrorMeasure m) {
  return m == ErrorMeasure::rmse ? "rmse" : "misclassification";
}

ErrorMeasure parse_error_measure(const std::string& name) {
  if (name == "rmse" || name == "RMSE") return ErrorMeasure::rmse;
  if (name == "misclassification" || name == "error_rate") {
    return ErrorMeasure::misclassification;
  }
  throw ConfigError("unknown error measure '" + name + "'");
}

double error_measure(std::span<const double> observed,
                     std::span<const double> predicted, ErrorMeasure kind) {
  if (observed.empty() || observed.size() != predicted.size()) {
    throw ParameterError("error_measure needs equal-length, non-empty input");
  }
  const auto n = static_cast<double>(observed.size());
  if (kind == ErrorMeasure::rmse) {
    double ss = 0.0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
      const double e = predicted[k] - observed[k];
      ss += e * e;
    }
    return std::sqrt(ss / n);
  }
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    if (observed[k] != std::round(observed[k]) ||
        predicted[k] != std::round(predicted[k])) {
      throw TypeError("misclassification rate needs class codes");
    }
    if (observed[k] != predicted[k]) ++wrong;
  }
  return static_cast<double>(wrong) / n;
}

std::vector<double> quadratic_breakpoints(double d_min, double d_max,
                                          int n_bins) {
  if (!(d_min < d_max) || n_bins < 1) {
    throw ParameterError("breakpoints need d_min < d_max and n_bins >= 1");
  }
  std::vector<double> b(n_bins + 1);
  for (int j = 0; j <= n_bins; ++j) {
    const double t = static_cast<double>(j) / n_bins;
    b[j] = d_min + (d_max - d_min) * t * t;
  }
  b.back() = d_max;
  return b;
}

std::vector<int> assign_bins(std::span<const double> distances,
                             std::span<const double> breakpoints) {
  const auto nb = static_cast<int>(breakpoints.size()) - 1;
  std::vector<int> bins(distances.size(), -1);
  if (nb < 1) return bins;
  for (std::size_t k = 0; k < distances.size(); ++k) {
    const double d = distances[k];
    if (d < breakpoints.front() || d > breakpoints.back()) continue;
    const auto it =
        std::upper_bound(breakpoints.begin(), breakpoints.end(), d);
    bins[k] = std::min(static_cast<int>(it - breakpoints.begin()) - 1, nb - 1);
  }
  return bins;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

}  // namespace

Profile bin_records(std::span<const ProfileRecord> records,
                    std::span<const double> breakpoints, ErrorMeasure measure,
                    const BinningOptions& options) {
  std::vector<double> d(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) d[k] = records[k].d;
  const auto bins = assign_bins(d, breakpoints);
  const int nb = static_cast<int>(breakpoints.size()) - 1;

  std::vector<std::vector<std::size_t>> members(std::max(nb, 0));
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (bins[k] >= 0) members[bins[k]].push_back(k);
  }

  Profile p;
  p.measure = to_string(measure);
  for (int b = 0; b < nb; ++b) {
    const auto& m = members[b];
    if (m.empty() || static_cast<Index>(m.size()) < options.min_records) {
      continue;
    }
    std::vector<double> obs, pred, dist;
    double train = 0.0;
    for (auto k : m) {
      obs.push_back(records[k].y);
      pred.push_back(records[k].y_hat);
      dist.push_back(records[k].d);
      train += static_cast<double>(records[k].train_size);
    }
    ProfilePoint pt;
    pt.d_hat = median_of(std::move(dist));
    pt.value = error_measure(obs, pred, measure);
    pt.n_records = static_cast<Index>(m.size());
    pt.mean_train_size = train / static_cast<double>(m.size());
    pt.bin = b;
    p.points.push_back(pt);
  }
  if (p.points.empty()) {
    throw EstimationError("no distance bin holds enough records");
  }
  p.smoothed.reserve(p.points.size());
  for (const auto& pt : p.points) p.smoothed.push_back(pt.value);
  return p;
}

std::vector<double> triangular_weights(int window) {
  if (window < 1 || window % 2 == 0) {
    throw ParameterError("smoothing window must be odd and positive");
  }
  const int h = window / 2;
  std::vector<double> w(window);
  for (int j = 0; j < window; ++j) w[j] = h + 1 - std::abs(j - h);
  return w;
}

std::vector<double> smooth_values(std::span<const double> values,
                                  std::span<const double> weights) {
  const auto window = static_cast<int>(weights.size());
  if (window < 1 || window % 2 == 0) {
    throw ParameterError("smoothing window must be odd and positive");
  }
  const int h = window / 2;
  const auto n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (int j = -h; j <= h; ++j) {
      const int k = i + j;
      if (k < 0 || k >= n) continue;
      num += weights[j + h] * values[k];
      den += weights[j + h];
    }
    out[i] = num / den;
  }
  return out;
}

Profile smooth_profile(Profile p, int window) {
  const auto w = triangular_weights(window);
  return smooth_profile(std::move(p), w);
}

Profile smooth_profile(Profile p, std::span<const double> weights) {
  std::vector<double> v;
  v.reserve(p.points.size());
  for (const auto& pt : p.points) v.push_back(pt.value);
  p.smoothed = smooth_values(v, weights);
  return p;
}

}  // namespace spdiag
