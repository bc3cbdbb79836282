#include "cardiomesh/kdtree.hpp"

#include <algorithm>
#include <numeric>

namespace cardiomesh {

namespace {
constexpr int kLeafSize = 8;
}

KdTree::KdTree(const VertexMatrix& points) : points_(points) {
  order_.resize(points_.rows());
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) {
    nodes_.reserve(2 * order_.size() / kLeafSize + 2);
    build(0, static_cast<int>(order_.size()));
  }
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Aabb box{points_.row(order_[begin]), points_.row(order_[begin])};
  for (int i = begin; i < end; ++i) box.expand(points_.row(order_[i]));
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
                     const double pa = points_(a, axis), pb = points_(b, axis);
                     return pa < pb || (pa == pb && a < b);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

KdTree::Hit KdTree::nearest(const Vec3& query) const {
  Hit best;
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
    // prune strictly so equal-distance candidates are still visited and the
    // lowest-index tie wins, matching a brute-force scan exactly
    if (box_dist_sq(node) > best.dist_sq) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        const double d2 = dist_sq(query, points_.row(idx));
        if (d2 < best.dist_sq || (d2 == best.dist_sq && idx < best.index)) {
          best.dist_sq = d2;
          best.index = idx;
        }
      }
    } else {
      // nearer child first
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

}  // namespace cardiomesh
