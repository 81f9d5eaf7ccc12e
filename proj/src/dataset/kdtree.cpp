#include <spdiag/kdtree.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace spdiag {

namespace {
constexpr Index kLeafSize = 8;
}

KdTree::KdTree(const Coordinates& points) : points_(points) {
  order_.resize(static_cast<std::size_t>(points_.rows()));
  std::iota(order_.begin(), order_.end(), Index{0});
  if (!order_.empty()) {
    nodes_.reserve(2 * order_.size() / kLeafSize + 2);
    build(0, size(), 0);
  }
}

Index KdTree::build(Index begin, Index end, int depth) {
  const Index id = static_cast<Index>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  // split on the axis with the larger spread
  double lo[2] = {std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (Index k = begin; k < end; ++k) {
    for (int a = 0; a < 2; ++a) {
      const double v = points_(order_[k], a);
      lo[a] = std::min(lo[a], v);
      hi[a] = std::max(hi[a], v);
    }
  }
  const int axis = (hi[0] - lo[0] >= hi[1] - lo[1]) ? 0 : 1;
  if (hi[axis] == lo[axis]) return id;  // all coincident

  const Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](Index a, Index b) {
                     return points_(a, axis) < points_(b, axis);
                   });
  const double split = points_(order_[mid], axis);
  const Index left = build(begin, mid, depth + 1);
  const Index right = build(mid, end, depth + 1);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(Index id, const Location& q,
                    const std::function<bool(Index, double)>* keep,
                    Neighbour& best) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (Index k = node.begin; k < node.end; ++k) {
      const Index i = order_[k];
      const double d = std::hypot(points_(i, 0) - q.x, points_(i, 1) - q.y);
      if (d > best.distance || (d == best.distance && i > best.index &&
                                best.index >= 0)) {
        continue;
      }
      if (keep && !(*keep)(i, d)) continue;
      best = {i, d};
    }
    return;
  }
  const double delta = (node.axis == 0 ? q.x : q.y) - node.split;
  const Index near = delta < 0 ? node.left : node.right;
  const Index far = delta < 0 ? node.right : node.left;
  search(near, q, keep, best);
  // points equal to the split value can sit on either side
  if (std::abs(delta) <= best.distance) search(far, q, keep, best);
}

KdTree::Neighbour KdTree::nearest(const Location& q) const {
  Neighbour best{-1, std::numeric_limits<double>::infinity()};
  if (!nodes_.empty()) search(0, q, nullptr, best);
  return best;
}

std::optional<KdTree::Neighbour> KdTree::nearest_if(
    const Location& q, const std::function<bool(Index, double)>& keep) const {
  Neighbour best{-1, std::numeric_limits<double>::infinity()};
  if (!nodes_.empty()) search(0, q, &keep, best);
  if (best.index < 0) return std::nullopt;
  return best;
}

template <class Visit>
void KdTree::range(Index id, const Location& q, double radius,
                   Visit&& visit) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (Index k = node.begin; k < node.end; ++k) {
      const Index i = order_[k];
      if (std::hypot(points_(i, 0) - q.x, points_(i, 1) - q.y) <= radius) {
        visit(i);
      }
    }
    return;
  }
  const double delta = (node.axis == 0 ? q.x : q.y) - node.split;
  if (delta <= radius) range(node.left, q, radius, visit);
  if (delta >= -radius) range(node.right, q, radius, visit);
}

std::vector<Index> KdTree::within(const Location& q, double radius) const {
  std::vector<Index> out;
  if (radius < 0 || nodes_.empty()) return out;
  range(0, q, radius, [&](Index i) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

Index KdTree::count_within(const Location& q, double radius) const {
  Index n = 0;
  if (radius < 0 || nodes_.empty()) return n;
  range(0, q, radius, [&](Index) { ++n; });
  return n;
}

}  // namespace spdiag
