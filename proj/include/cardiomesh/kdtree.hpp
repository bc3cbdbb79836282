#pragma once

#include <vector>

#include "cardiomesh/types.hpp"

namespace cardiomesh {

/// Static 3D point KD-tree. Nearest-neighbor ties resolve to the lowest
/// point index, so queries agree exactly with a brute-force scan.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(const VertexMatrix& points);

  struct Hit {
    int index = -1;
    double dist_sq = 0.0;
  };

  Hit nearest(const Vec3& query) const;
  int size() const { return static_cast<int>(points_.rows()); }

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;  // children, or leaf when left < 0
    int begin = 0, end = 0;     // leaf range into order_
  };

  int build(int begin, int end);

  VertexMatrix points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// d2 computed with the same expression as KdTree::nearest so exact
/// comparisons between paths are meaningful.
inline double dist_sq(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace cardiomesh
