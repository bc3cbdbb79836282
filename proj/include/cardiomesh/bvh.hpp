#pragma once

#include <vector>

#include "cardiomesh/mesh.hpp"
#include "cardiomesh/predicates.hpp"

namespace cardiomesh {

/// Axis-aligned bounding volume hierarchy over the faces of a mesh.
/// Closest-point ties resolve to the lowest face index.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriangleMesh& mesh);

  struct SurfaceHit {
    int face = -1;
    Vec3 point{0, 0, 0};
    Vec3 barycentric{0, 0, 0};
    double dist_sq = 0.0;
  };

  SurfaceHit closest_point(const Vec3& query) const;

  /// Faces whose bounding box overlaps `box` (closed comparison).
  void overlapping_faces(const Aabb& box, std::vector<int>& out) const;

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };

  int build(int begin, int end, const std::vector<Vec3>& centroids);

  const TriangleMesh& mesh_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace cardiomesh
