#pragma once

#include <spdiag/types.hpp>

#include <functional>
#include <optional>
#include <vector>

namespace spdiag {

/// Static 2-d tree over a point set. Indices refer to rows of the
/// coordinate matrix handed to the constructor.
class KdTree {
 public:
  struct Neighbour {
    Index index = -1;
    double distance = 0.0;
  };

  KdTree() = default;
  explicit KdTree(const Coordinates& points);

  Index size() const { return static_cast<Index>(order_.size()); }

  /// Nearest point; ties resolved towards the lower index.
  Neighbour nearest(const Location& q) const;

  /// Nearest point among those accepted by `keep(index, distance)`.
  std::optional<Neighbour> nearest_if(
      const Location& q,
      const std::function<bool(Index, double)>& keep) const;

  /// Indices with distance <= radius, ascending.
  std::vector<Index> within(const Location& q, double radius) const;

  /// Number of points with distance <= radius.
  Index count_within(const Location& q, double radius) const;

 private:
  struct Node {
    Index begin = 0;
    Index end = 0;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    Index left = -1;
    Index right = -1;
  };

  Index build(Index begin, Index end, int depth);
  void search(Index node, const Location& q,
              const std::function<bool(Index, double)>* keep,
              Neighbour& best) const;
  template <class Visit>
  void range(Index node, const Location& q, double radius, Visit&& visit) const;

  Coordinates points_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

}  // namespace spdiag
