#include "cardiomesh/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace cardiomesh {

Aabb Aabb::of(const VertexMatrix& points) {
  Aabb box;
  if (points.rows() == 0) return box;
  box.lo = points.colwise().minCoeff();
  box.hi = points.colwise().maxCoeff();
  return box;
}

void TriangleMesh::validate() const {
  const int n = vertex_count();
  for (int f = 0; f < face_count(); ++f) {
    const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
    if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n)
      throw ValidationError("face " + std::to_string(f) +
                            " references vertex out of range");
    if (a == b || b == c || a == c)
      throw ValidationError("face " + std::to_string(f) +
                            " is degenerate (repeated vertex index)");
  }
}

Aabb TriangleMesh::bounding_box() const { return Aabb::of(vertices); }

bool CapRecord::is_inlet() const {
  std::string lower(name.size(), '\0');
  std::transform(name.begin(), name.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return lower.find("inlet") != std::string::npos;
}

void TemplateTags::validate(const TriangleMesh& mesh) const {
  const int m = mesh.face_count();
  auto check_faces = [m](const std::vector<int>& ids, const std::string& what) {
    for (int f : ids)
      if (f < 0 || f >= m)
        throw ValidationError(what + " references face " + std::to_string(f) +
                              " out of range");
  };
  for (const auto& [name, ids] : structures) {
    if (ids.empty())
      throw ValidationError("structure '" + name + "' is empty");
    check_faces(ids, "structure '" + name + "'");
  }
  for (const auto& cap : caps) {
    if (cap.cap_faces.empty())
      throw ValidationError("cap '" + cap.name + "' has no cap faces");
    check_faces(cap.cap_faces, "cap '" + cap.name + "'");
    check_faces(cap.wall_faces, "wall of cap '" + cap.name + "'");
    std::set<int> cap_set(cap.cap_faces.begin(), cap.cap_faces.end());
    for (int f : cap.wall_faces)
      if (cap_set.count(f))
        throw ValidationError("cap '" + cap.name +
                              "': cap and wall face sets overlap at face " +
                              std::to_string(f));
  }
  if (vertex_weights.size() != mesh.vertex_count())
    throw ValidationError("vertex_weights length " +
                          std::to_string(vertex_weights.size()) +
                          " does not match vertex count " +
                          std::to_string(mesh.vertex_count()));
  for (Eigen::Index i = 0; i < vertex_weights.size(); ++i)
    if (!(vertex_weights[i] >= 0.0))
      throw ValidationError("vertex weight " + std::to_string(i) +
                            " is negative or not finite");
}

VertexMatrix face_normals_raw(const TriangleMesh& mesh) {
  const int m = mesh.face_count();
  VertexMatrix raw(m, 3);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < m; ++f) {
    const Vec3 v0 = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 e1 = mesh.vertices.row(mesh.faces(f, 1)).transpose() - v0;
    const Vec3 e2 = mesh.vertices.row(mesh.faces(f, 2)).transpose() - v0;
    raw.row(f) = e1.cross(e2);
  }
  return raw;
}

VertexMatrix face_normals(const TriangleMesh& mesh) {
  VertexMatrix raw = face_normals_raw(mesh);
  for (int f = 0; f < raw.rows(); ++f) {
    const double len = raw.row(f).norm();
    if (len < 1e-12)
      throw ValidationError("face " + std::to_string(f) +
                            " is degenerate (zero area)");
    raw.row(f) /= len;
  }
  return raw;
}

VectorXd face_areas(const TriangleMesh& mesh) {
  VertexMatrix raw = face_normals_raw(mesh);
  return 0.5 * raw.rowwise().norm();
}

VertexMatrix vertex_normals(const TriangleMesh& mesh) {
  VertexMatrix raw = face_normals_raw(mesh);
  VertexMatrix out = VertexMatrix::Zero(mesh.vertex_count(), 3);
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) out.row(mesh.faces(f, k)) += raw.row(f);
  for (int i = 0; i < out.rows(); ++i) {
    const double len = out.row(i).norm();
    if (len > 0) out.row(i) /= len;
  }
  return out;
}

std::vector<std::pair<int, int>> boundary_edges(const TriangleMesh& mesh) {
  // forward - backward count per undirected edge; closed oriented surface
  // means every edge nets to zero with exactly one traversal each way.
  std::map<std::pair<int, int>, int> balance;
  for (int f = 0; f < mesh.face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = mesh.faces(f, k), b = mesh.faces(f, (k + 1) % 3);
      if (a < b)
        balance[{a, b}] += 1;
      else
        balance[{b, a}] -= 1;
    }
  }
  std::vector<std::pair<int, int>> bad;
  for (const auto& [edge, net] : balance)
    if (net != 0) bad.push_back(edge);
  return bad;
}

VolumeResult enclosed_volume(const TriangleMesh& mesh) {
  auto bad = boundary_edges(mesh);
  if (!bad.empty()) {
    std::ostringstream oss;
    oss << "mesh is not closed/consistently oriented; " << bad.size()
        << " boundary edges, first:";
    for (size_t i = 0; i < bad.size() && i < 8; ++i)
      oss << " (" << bad[i].first << "," << bad[i].second << ")";
    throw ValidationError(oss.str());
  }
  const int m = mesh.face_count();
  VectorXd contrib(m);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < m; ++f) {
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.faces(f, 2));
    contrib[f] = a.dot(b.cross(c)) / 6.0;
  }
  double sum = 0.0;
  for (int f = 0; f < m; ++f) sum += contrib[f];  // fixed order
  VolumeResult r;
  r.volume = std::abs(sum);
  r.sign = (sum > 0) - (sum < 0);
  return r;
}

SurfaceSamples surface_samples(const TriangleMesh& mesh, int count,
                               std::uint64_t seed) {
  if (count < 1) throw ValidationError("sample count must be >= 1");
  const int m = mesh.face_count();
  if (m == 0) throw ValidationError("cannot sample an empty mesh");

  VertexMatrix raw = face_normals_raw(mesh);
  std::vector<double> cumulative(m);
  double total = 0.0;
  for (int f = 0; f < m; ++f) {
    total += 0.5 * raw.row(f).norm();
    cumulative[f] = total;
  }
  if (total <= 0.0) throw ValidationError("mesh has zero total area");

  SurfaceSamples out;
  out.points.resize(count, 3);
  out.normals.resize(count, 3);
  out.source_face.resize(count);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    const std::uint64_t base = 3ULL * static_cast<std::uint64_t>(i);
    const double uf = uniform01_at(seed, base);
    const double ua = uniform01_at(seed, base + 1);
    const double ub = uniform01_at(seed, base + 2);
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), uf * total);
    const int f = std::min<int>(m - 1,
                                static_cast<int>(it - cumulative.begin()));
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0));
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1));
    const Vec3 c = mesh.vertices.row(mesh.faces(f, 2));
    const double r = std::sqrt(ua);
    const double b0 = 1.0 - r, b1 = r * (1.0 - ub), b2 = r * ub;
    out.points.row(i) = b0 * a + b1 * b + b2 * c;
    out.normals.row(i) = raw.row(f).normalized();
    out.source_face[i] = f;
  }
  return out;
}

SubMesh extract_submesh(const TriangleMesh& mesh,
                        const std::vector<int>& face_indices) {
  SubMesh sub;
  std::vector<int> global_to_local(mesh.vertex_count(), -1);
  for (int f : face_indices) {
    if (f < 0 || f >= mesh.face_count())
      throw ValidationError("submesh face index out of range");
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.faces(f, k);
      if (global_to_local[v] < 0) {
        global_to_local[v] = static_cast<int>(sub.vertex_map.size());
        sub.vertex_map.push_back(v);
      }
    }
  }
  sub.mesh.vertices.resize(sub.vertex_map.size(), 3);
  for (size_t i = 0; i < sub.vertex_map.size(); ++i)
    sub.mesh.vertices.row(i) = mesh.vertices.row(sub.vertex_map[i]);
  sub.mesh.faces.resize(face_indices.size(), 3);
  for (size_t i = 0; i < face_indices.size(); ++i)
    for (int k = 0; k < 3; ++k)
      sub.mesh.faces(i, k) = global_to_local[mesh.faces(face_indices[i], k)];
  return sub;
}

}  // namespace cardiomesh
