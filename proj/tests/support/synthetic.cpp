#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace cardiomesh::synthetic {

namespace {

TriangleMesh from_lists(const std::vector<Vec3>& vertices,
                        const std::vector<std::array<int, 3>>& faces) {
  TriangleMesh mesh;
  mesh.vertices.resize(vertices.size(), 3);
  for (size_t i = 0; i < vertices.size(); ++i) mesh.vertices.row(i) = vertices[i];
  mesh.faces.resize(faces.size(), 3);
  for (size_t i = 0; i < faces.size(); ++i)
    for (int k = 0; k < 3; ++k) mesh.faces(i, k) = faces[i][k];
  mesh.validate();
  return mesh;
}

}  // namespace

TriangleMesh unit_cube() {
  const std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  const std::vector<std::array<int, 3>> f = {
      {0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
      {2, 3, 7}, {2, 7, 6}, {0, 4, 7}, {0, 7, 3}, {1, 2, 6}, {1, 6, 5}};
  return from_lists(v, f);
}

TriangleMesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(v.size());
      v.push_back(((v[a] + v[b]) * 0.5).normalized());
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& face : f) {
      const int ab = mid(face[0], face[1]);
      const int bc = mid(face[1], face[2]);
      const int ca = mid(face[2], face[0]);
      next.push_back({face[0], ab, ca});
      next.push_back({face[1], bc, ab});
      next.push_back({face[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return from_lists(v, f);
}

TriangleMesh ellipsoid(int subdivisions, const Vec3& semi_axes) {
  TriangleMesh mesh = icosphere(subdivisions, 1.0);
  for (int i = 0; i < mesh.vertex_count(); ++i)
    mesh.vertices.row(i) =
        mesh.vertices.row(i).cwiseProduct(semi_axes.transpose());
  return mesh;
}

TriangleMesh single_triangle() {
  return from_lists({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
}

TriangleMesh unit_square() {
  return from_lists({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}},
                    {{0, 1, 2}, {0, 2, 3}});
}

TriangleMesh two_triangle_strip() {
  return from_lists({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}},
                    {{0, 1, 2}, {1, 3, 2}});
}

TriangleMesh crumpled_strip(int segments, std::uint64_t seed,
                            double amplitude) {
  std::vector<Vec3> v;
  std::uint64_t k = 0;
  auto jitter = [&]() {
    return amplitude * (2.0 * uniform01_at(seed, k++) - 1.0);
  };
  for (int i = 0; i <= segments; ++i) {
    v.push_back({i * 0.5 + jitter(), jitter(), jitter()});
    v.push_back({i * 0.5 + jitter(), 1.0 + jitter(), jitter()});
  }
  std::vector<std::array<int, 3>> f;
  for (int i = 0; i < segments; ++i) {
    const int a = 2 * i, b = 2 * i + 1, c = 2 * i + 2, d = 2 * i + 3;
    f.push_back({a, c, b});
    f.push_back({b, c, d});
  }
  return from_lists(v, f);
}

namespace {

// Directed boundary loops of a mesh with holes, each ordered along the
// missing edge direction and started at its smallest vertex index.
std::vector<std::vector<int>> boundary_loops(
    const std::vector<std::array<int, 3>>& faces) {
  std::set<std::pair<int, int>> directed;
  for (const auto& f : faces)
    for (int k = 0; k < 3; ++k) directed.insert({f[k], f[(k + 1) % 3]});
  std::map<int, int> missing_next;  // b -> a for present (a -> b) w/o reverse
  for (const auto& [a, b] : directed)
    if (!directed.count({b, a})) missing_next[b] = a;

  std::vector<std::vector<int>> loops;
  std::set<int> used;
  for (const auto& [start, first] : missing_next) {
    (void)first;
    if (used.count(start)) continue;
    std::vector<int> loop;
    int at = start;
    do {
      loop.push_back(at);
      used.insert(at);
      at = missing_next.at(at);
    } while (at != start);
    const auto smallest = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), smallest, loop.end());
    loops.push_back(std::move(loop));
  }
  std::sort(loops.begin(), loops.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  return loops;
}

}  // namespace

TaggedMesh vessel_template(int vessels) {
  if (vessels < 1 || vessels > 4)
    throw ValidationError("vessel_template supports 1..4 vessels");

  constexpr int R = 16;  // latitude divisions
  constexpr int C = 24;  // longitude divisions
  constexpr double sphere_radius = 1.0;

  std::vector<Vec3> v;
  v.push_back({0, 0, sphere_radius});   // 0: north pole
  v.push_back({0, 0, -sphere_radius});  // 1: south pole
  auto ring_vertex = [&](int i, int j) { return 2 + (i - 1) * C + (j % C); };
  for (int i = 1; i < R; ++i) {
    const double theta = M_PI * i / R;
    for (int j = 0; j < C; ++j) {
      const double phi = 2.0 * M_PI * j / C;
      v.push_back({sphere_radius * std::sin(theta) * std::cos(phi),
                   sphere_radius * std::sin(theta) * std::sin(phi),
                   sphere_radius * std::cos(theta)});
    }
  }

  // equatorial hole rectangles, one per vessel: quad rows [6,10) and 4
  // columns starting at 1 + 6k
  auto in_hole = [&](int i, int j) {
    if (i < 6 || i >= 10) return false;
    for (int k = 0; k < vessels; ++k) {
      const int j0 = 1 + 6 * k;
      if (j >= j0 && j < j0 + 4) return true;
    }
    return false;
  };

  std::vector<std::array<int, 3>> f;
  for (int j = 0; j < C; ++j) {
    f.push_back({0, ring_vertex(1, j), ring_vertex(1, j + 1)});
    f.push_back({1, ring_vertex(R - 1, j + 1), ring_vertex(R - 1, j)});
  }
  for (int i = 1; i < R - 1; ++i) {
    for (int j = 0; j < C; ++j) {
      if (in_hole(i, j)) continue;
      const int a = ring_vertex(i, j), b = ring_vertex(i, j + 1);
      const int c = ring_vertex(i + 1, j + 1), d = ring_vertex(i + 1, j);
      f.push_back({a, d, c});
      f.push_back({a, c, b});
    }
  }

  const auto loops = boundary_loops(f);
  if (static_cast<int>(loops.size()) != vessels)
    throw ValidationError("vessel template construction produced " +
                          std::to_string(loops.size()) + " boundary loops");

  TemplateTags tags;
  constexpr int kTubeRings = 3;
  constexpr double kTubeLength = 0.5;
  constexpr double kCapRadiusScale = 0.55;

  for (size_t vessel = 0; vessel < loops.size(); ++vessel) {
    const auto& loop = loops[vessel];
    const int S = static_cast<int>(loop.size());

    Vec3 centroid = Vec3::Zero();
    for (int idx : loop) centroid += v[idx];
    centroid /= S;
    const Vec3 axis = centroid.normalized();
    Vec3 u = std::abs(axis.z()) < 0.9 ? axis.cross(Vec3(0, 0, 1)).normalized()
                                      : axis.cross(Vec3(1, 0, 0)).normalized();
    const Vec3 w = axis.cross(u);

    double mean_rho = 0.0;
    for (int idx : loop)
      mean_rho += (v[idx] - v[idx].dot(axis) * axis).norm();
    mean_rho /= S;
    const double cap_radius = kCapRadiusScale * mean_rho;
    const Vec3 cap_center = (sphere_radius + kTubeLength) * axis;

    std::vector<Vec3> circle(S);
    for (int t = 0; t < S; ++t) {
      const Vec3 radial = v[loop[t]] - v[loop[t]].dot(axis) * axis;
      const double angle = std::atan2(w.dot(radial), u.dot(radial));
      circle[t] = cap_center +
                  cap_radius * (std::cos(angle) * u + std::sin(angle) * w);
    }

    std::vector<std::vector<int>> rings;
    rings.push_back(loop);
    for (int s = 1; s <= kTubeRings; ++s) {
      std::vector<int> ring(S);
      const double mix = static_cast<double>(s) / kTubeRings;
      for (int t = 0; t < S; ++t) {
        ring[t] = static_cast<int>(v.size());
        v.push_back((1.0 - mix) * v[loop[t]] + mix * circle[t]);
      }
      rings.push_back(std::move(ring));
    }
    const int center_idx = static_cast<int>(v.size());
    v.push_back(cap_center);

    CapRecord cap;
    cap.name = (vessel % 2 == 0 ? "inlet_" : "outlet_") +
               std::to_string(vessel);
    for (int s = 1; s <= kTubeRings; ++s) {
      const auto& lower = rings[s - 1];
      const auto& upper = rings[s];
      for (int t = 0; t < S; ++t) {
        const int t1 = (t + 1) % S;
        const int face_a = static_cast<int>(f.size());
        f.push_back({lower[t], lower[t1], upper[t1]});
        f.push_back({lower[t], upper[t1], upper[t]});
        if (s == kTubeRings) {
          cap.wall_faces.push_back(face_a);
          cap.wall_faces.push_back(face_a + 1);
        }
      }
    }
    const auto& rim = rings[kTubeRings];
    for (int t = 0; t < S; ++t) {
      cap.cap_faces.push_back(static_cast<int>(f.size()));
      f.push_back({rim[t], rim[(t + 1) % S], center_idx});
    }
    tags.caps.push_back(std::move(cap));
  }

  TaggedMesh out;
  out.mesh = from_lists(v, f);
  std::vector<int> all(out.mesh.face_count());
  for (int i = 0; i < out.mesh.face_count(); ++i) all[i] = i;
  tags.structures["all"] = all;
  tags.vertex_weights = VectorXd::Ones(out.mesh.vertex_count());
  out.tags = tags;
  out.tags.validate(out.mesh);
  return out;
}

TriangleMesh subdivide_midpoint(const TriangleMesh& mesh) {
  std::vector<Vec3> v(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) v[i] = mesh.vertices.row(i);
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(v.size());
    v.push_back((v[a] + v[b]) * 0.5);
    midpoint[key] = idx;
    return idx;
  };
  std::vector<std::array<int, 3>> f;
  f.reserve(mesh.face_count() * 4);
  for (int i = 0; i < mesh.face_count(); ++i) {
    const int a = mesh.faces(i, 0), b = mesh.faces(i, 1), c = mesh.faces(i, 2);
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    f.push_back({a, ab, ca});
    f.push_back({b, bc, ab});
    f.push_back({c, ca, bc});
    f.push_back({ab, bc, ca});
  }
  return from_lists(v, f);
}

VertexMatrix bump_displace(const VertexMatrix& vertices, const Vec3& center,
                           double sigma, const Vec3& dir, double amplitude) {
  VertexMatrix out = vertices;
  for (int i = 0; i < out.rows(); ++i) {
    const double d2 = (out.row(i).transpose() - center).squaredNorm();
    out.row(i) += amplitude * std::exp(-d2 / (sigma * sigma)) * dir.transpose();
  }
  return out;
}

}  // namespace cardiomesh::synthetic
