#pragma once

#include <vector>

#include "cardiomesh/mesh.hpp"

namespace cardiomesh {

/// Ordered control-handle vertex indices. The order fixes the column order
/// of the biharmonic map and of every handle-position matrix downstream.
struct HandleSet {
  std::vector<int> indices;

  int count() const { return static_cast<int>(indices.size()); }
  void validate(int vertex_count) const;

  /// Rows of `vertices` at the handle indices (the selector Q applied).
  VertexMatrix positions(const VertexMatrix& vertices) const;
};

/// Euclidean farthest-point sampling from start_index; ties break to the
/// lowest vertex index, so the result is deterministic.
HandleSet sample_handles(const TriangleMesh& mesh, int count,
                         int start_index = 0);

}  // namespace cardiomesh
