#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arthro/geometry.h"

namespace arthro::detail {

/// Squared Euclidean distance with a fixed evaluation order, shared by the
/// index and any exhaustive search so both produce bit-identical values.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Static 3-d tree for exact nearest-neighbour queries.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points);

  struct Hit {
    std::size_t index = 0;
    double squared_distance = 0.0;
  };
  Hit nearest(const Vec3& query) const;

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    int axis;       // -1 for leaves
    double split;
    std::size_t left;
    std::size_t right;
  };

  std::size_t build(std::size_t begin, std::size_t end, int depth);
  void search(std::size_t node, const Vec3& q, Hit& best) const;

  std::span<const Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace arthro::detail
