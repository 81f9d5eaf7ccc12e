#include <spdiag/comparators.hpp>
#include <spdiag/errors.hpp>

#include <limits>

namespace spdiag {

namespace {

double sq_dist(const Coordinates& p, Index i, const Eigen::MatrixX2d& c,
               Index k) {
  const double dx = p(i, 0) - c(k, 0);
  const double dy = p(i, 1) - c(k, 1);
  return dx * dx + dy * dy;
}

KMeansResult lloyd(const Coordinates& points, int k, std::mt19937_64& rng) {
  const Index n = points.rows();
  KMeansResult res;
  res.centers.resize(k, 2);

  // k-means++ seeding.
  std::uniform_int_distribution<Index> first(0, n - 1);
  res.centers.row(0) = points.row(first(rng));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(points, i, res.centers, c - 1));
      total += d2[i];
    }
    Index chosen = n - 1;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (Index i = 0; i < n; ++i) {
        u -= d2[i];
        if (u < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    res.centers.row(c) = points.row(chosen);
  }

  res.assignment.assign(n, -1);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(points, i, res.centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points, i, res.centers, c);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    Eigen::MatrixX2d sums = Eigen::MatrixX2d::Zero(k, 2);
    std::vector<Index> counts(k, 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(res.assignment[i]) += points.row(i);
      ++counts[res.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        res.centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
        continue;
      }
      // Empty cluster: restart it at the point farthest from its center.
      Index far = 0;
      double fd = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d = sq_dist(points, i, res.centers, res.assignment[i]);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      res.centers.row(c) = points.row(far);
      res.assignment[far] = c;
    }
  }
  res.inertia = 0.0;
  for (Index i = 0; i < n; ++i) {
    res.inertia += sq_dist(points, i, res.centers, res.assignment[i]);
  }
  return res;
}

}  // namespace

KMeansResult kmeans(const Coordinates& points, int k, int restarts,
                    std::mt19937_64& rng) {
  if (k < 1 || k > points.rows()) {
    throw ParameterError("k-means needs 1 <= k <= number of points");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    auto res = lloyd(points, k, rng);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

}  // namespace spdiag
