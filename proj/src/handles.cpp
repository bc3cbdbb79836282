#include "cardiomesh/handles.hpp"

#include <numeric>
#include <set>

#include "cardiomesh/kdtree.hpp"

namespace cardiomesh {

void HandleSet::validate(int vertex_count) const {
  if (indices.empty()) throw ValidationError("handle set is empty");
  std::set<int> seen;
  for (int idx : indices) {
    if (idx < 0 || idx >= vertex_count)
      throw ValidationError("handle index " + std::to_string(idx) +
                            " out of range");
    if (!seen.insert(idx).second)
      throw ValidationError("duplicate handle index " + std::to_string(idx));
  }
}

VertexMatrix HandleSet::positions(const VertexMatrix& vertices) const {
  VertexMatrix P(indices.size(), 3);
  for (size_t i = 0; i < indices.size(); ++i)
    P.row(i) = vertices.row(indices[i]);
  return P;
}

HandleSet sample_handles(const TriangleMesh& mesh, int count,
                         int start_index) {
  const int n = mesh.vertex_count();
  if (count < 1 || count > n)
    throw ValidationError("handle count " + std::to_string(count) +
                          " out of range [1, " + std::to_string(n) + "]");
  if (start_index < 0 || start_index >= n)
    throw ValidationError("start index out of range");

  HandleSet handles;
  handles.indices.reserve(count);
  handles.indices.push_back(start_index);

  std::vector<double> dist(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    dist[i] = dist_sq(mesh.vertices.row(i), mesh.vertices.row(start_index));

  for (int picked = 1; picked < count; ++picked) {
    // serial argmax keeps the lowest-index tie rule exact
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (dist[i] > dist[best]) best = i;
    handles.indices.push_back(best);
    const Vec3 p = mesh.vertices.row(best);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
      dist[i] = std::min(dist[i], dist_sq(mesh.vertices.row(i), p));
  }
  return handles;
}

}  // namespace cardiomesh
