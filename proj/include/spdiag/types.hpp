#pragma once

#include <Eigen/Core>
#include <cmath>

namespace spdiag {

using Index = Eigen::Index;

/// Projected planar coordinate pair in meters.
struct Location {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

inline double distance(const Location& a, const Location& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// n x 2 coordinate matrix, one (x, y) row per observation.
using Coordinates = Eigen::Matrix<double, Eigen::Dynamic, 2>;

inline Location location_of(const Coordinates& c, Index i) {
  return {c(i, 0), c(i, 1)};
}

enum class ResponseKind { regression, classification };

}  // namespace spdiag
