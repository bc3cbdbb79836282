#include "cardiomesh/bvh.hpp"

#include <algorithm>
#include <numeric>

#include "cardiomesh/kdtree.hpp"

namespace cardiomesh {

namespace {
constexpr int kLeafSize = 4;

Aabb face_box(const TriangleMesh& mesh, int f) {
  Aabb box{mesh.vertices.row(mesh.faces(f, 0)),
           mesh.vertices.row(mesh.faces(f, 0))};
  box.expand(mesh.vertices.row(mesh.faces(f, 1)));
  box.expand(mesh.vertices.row(mesh.faces(f, 2)));
  return box;
}

bool boxes_overlap(const Aabb& a, const Aabb& b) {
  return (a.lo.array() <= b.hi.array()).all() &&
         (b.lo.array() <= a.hi.array()).all();
}

}  // namespace

TriangleBvh::TriangleBvh(const TriangleMesh& mesh) : mesh_(mesh) {
  order_.resize(mesh.face_count());
  std::iota(order_.begin(), order_.end(), 0);
  if (order_.empty()) return;
  std::vector<Vec3> centroids(order_.size());
  for (int f = 0; f < mesh.face_count(); ++f)
    centroids[f] = (mesh.vertices.row(mesh.faces(f, 0)) +
                    mesh.vertices.row(mesh.faces(f, 1)) +
                    mesh.vertices.row(mesh.faces(f, 2))) /
                   3.0;
  nodes_.reserve(2 * order_.size() / kLeafSize + 2);
  build(0, static_cast<int>(order_.size()), centroids);
}

int TriangleBvh::build(int begin, int end,
                       const std::vector<Vec3>& centroids) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Aabb box = face_box(mesh_, order_[begin]);
  for (int i = begin + 1; i < end; ++i) {
    const Aabb fb = face_box(mesh_, order_[i]);
    box.expand(fb.lo);
    box.expand(fb.hi);
  }
  nodes_[id].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  int axis = 0;
  const Vec3 extent = box.hi - box.lo;
  if (extent.y() > extent.x()) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  const int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double pa = centroids[a][axis], pb = centroids[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const int left = build(begin, mid, centroids);
  const int right = build(mid, end, centroids);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

TriangleBvh::SurfaceHit TriangleBvh::closest_point(const Vec3& query) const {
  SurfaceHit best;
  if (order_.empty()) return best;
  best.dist_sq = std::numeric_limits<double>::infinity();

  auto box_dist_sq = [&](const Node& node) {
    const Vec3 clamped = query.cwiseMax(node.box.lo).cwiseMin(node.box.hi);
    return dist_sq(query, clamped);
  };

  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_dist_sq(node) > best.dist_sq) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[i];
        const ClosestPoint cp = closest_point_on_triangle(
            query, mesh_.vertices.row(mesh_.faces(f, 0)),
            mesh_.vertices.row(mesh_.faces(f, 1)),
            mesh_.vertices.row(mesh_.faces(f, 2)));
        const double d2 = dist_sq(query, cp.point);
        if (d2 < best.dist_sq || (d2 == best.dist_sq && f < best.face)) {
          best.dist_sq = d2;
          best.face = f;
          best.point = cp.point;
          best.barycentric = cp.barycentric;
        }
      }
    } else {
      const double dl = box_dist_sq(nodes_[node.left]);
      const double dr = box_dist_sq(nodes_[node.right]);
      if (dl <= dr) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
  }
  return best;
}

void TriangleBvh::overlapping_faces(const Aabb& box,
                                    std::vector<int>& out) const {
  out.clear();
  if (order_.empty()) return;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!boxes_overlap(node.box, box)) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int f = order_[i];
        if (boxes_overlap(face_box(mesh_, f), box)) out.push_back(f);
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }
}

}  // namespace cardiomesh
