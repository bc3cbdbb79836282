#include "cardiomesh/quality.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "cardiomesh/bvh.hpp"
#include "cardiomesh/kdtree.hpp"

namespace cardiomesh {

std::vector<char> self_intersecting_faces(const TriangleMesh& mesh) {
  const int m = mesh.face_count();
  std::vector<char> flags(m, 0);
  if (m < 2) return flags;
  const TriangleBvh bvh(mesh);

#pragma omp parallel
  {
    std::vector<int> candidates;
#pragma omp for schedule(dynamic, 16)
    for (int f = 0; f < m; ++f) {
      Aabb box{mesh.vertices.row(mesh.faces(f, 0)),
               mesh.vertices.row(mesh.faces(f, 0))};
      box.expand(mesh.vertices.row(mesh.faces(f, 1)));
      box.expand(mesh.vertices.row(mesh.faces(f, 2)));
      bvh.overlapping_faces(box, candidates);
      const Vec3 p0 = mesh.vertices.row(mesh.faces(f, 0));
      const Vec3 p1 = mesh.vertices.row(mesh.faces(f, 1));
      const Vec3 p2 = mesh.vertices.row(mesh.faces(f, 2));
      for (int g : candidates) {
        if (g == f) continue;
        bool adjacent = false;
        for (int a = 0; a < 3 && !adjacent; ++a)
          for (int b = 0; b < 3; ++b)
            if (mesh.faces(f, a) == mesh.faces(g, b)) {
              adjacent = true;
              break;
            }
        if (adjacent) continue;
        if (tri_tri_intersect(p0, p1, p2, mesh.vertices.row(mesh.faces(g, 0)),
                              mesh.vertices.row(mesh.faces(g, 1)),
                              mesh.vertices.row(mesh.faces(g, 2)))) {
          flags[f] = 1;
          break;
        }
      }
    }
  }
  return flags;
}

double self_intersection_fraction(const TriangleMesh& mesh) {
  const auto flags = self_intersecting_faces(mesh);
  if (flags.empty()) return 0.0;
  long count = 0;
  for (char f : flags) count += f;
  return static_cast<double>(count) / static_cast<double>(flags.size());
}

namespace {

std::vector<int> vertex_set_of_faces(const TriangleMesh& mesh,
                                     const std::vector<int>& faces) {
  std::set<int> verts;
  for (int f : faces)
    for (int k = 0; k < 3; ++k) verts.insert(mesh.faces(f, k));
  return {verts.begin(), verts.end()};
}

Vec3 mean_of_rows(const VertexMatrix& rows, const std::vector<int>& ids) {
  Vec3 mean = Vec3::Zero();
  for (int i : ids) mean += rows.row(i).transpose();
  return mean / static_cast<double>(ids.size());
}

Vec3 normalized_or_throw(const Vec3& v, const std::string& what) {
  const double len = v.norm();
  if (len < 1e-12)
    throw ValidationError(what + " has zero-length mean vector");
  return v / len;
}

}  // namespace

std::vector<double> cap_wall_orthogonality(const TriangleMesh& mesh,
                                           const TemplateTags& tags,
                                           CwoVariant variant) {
  const VertexMatrix normals = vertex_normals(mesh);
  std::vector<double> out;
  out.reserve(tags.caps.size());
  for (const auto& cap : tags.caps) {
    const auto cap_verts = vertex_set_of_faces(mesh, cap.cap_faces);
    const auto wall_verts = vertex_set_of_faces(mesh, cap.wall_faces);
    if (cap_verts.empty() || wall_verts.empty())
      throw ValidationError("cap '" + cap.name +
                            "' needs nonempty cap and wall vertex sets");
    const Vec3 cap_mean = normalized_or_throw(
        mean_of_rows(normals, cap_verts), "cap '" + cap.name + "'");
    if (variant == CwoVariant::mean_normals) {
      const Vec3 wall_mean = normalized_or_throw(
          mean_of_rows(normals, wall_verts), "wall of cap '" + cap.name + "'");
      out.push_back(1.0 - wall_mean.dot(cap_mean));
    } else {
      const Vec3 cap_centroid = mean_of_rows(mesh.vertices, cap_verts);
      const Vec3 wall_centroid = mean_of_rows(mesh.vertices, wall_verts);
      const Vec3 axis = normalized_or_throw(cap_centroid - wall_centroid,
                                            "centroid axis of cap '" +
                                                cap.name + "'");
      out.push_back(1.0 - cap_mean.dot(axis));
    }
  }
  return out;
}

std::vector<double> cap_coplanarity(const TriangleMesh& mesh,
                                    const TemplateTags& tags) {
  std::vector<double> out;
  out.reserve(tags.caps.size());
  for (const auto& cap : tags.caps) {
    const auto verts = vertex_set_of_faces(mesh, cap.cap_faces);
    if (verts.size() < 3)
      throw ValidationError("cap '" + cap.name + "' has fewer than 3 vertices");
    const Vec3 centroid = mean_of_rows(mesh.vertices, verts);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : verts) {
      const Vec3 d = mesh.vertices.row(i).transpose() - centroid;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d values = eig.eigenvalues();  // ascending
    if (values[1] <= 1e-12 * std::max(values[2], 1e-300))
      throw ValidationError("cap '" + cap.name + "' vertices are collinear");
    const Vec3 plane_normal = eig.eigenvectors().col(0);
    double mean_abs = 0.0;
    for (int i : verts)
      mean_abs += std::abs(
          (mesh.vertices.row(i).transpose() - centroid).dot(plane_normal));
    out.push_back(mean_abs / static_cast<double>(verts.size()));
  }
  return out;
}

ChamferHausdorff chamfer_hausdorff_points(const VertexMatrix& a,
                                          const VertexMatrix& b) {
  if (a.rows() == 0 || b.rows() == 0)
    throw ValidationError("chamfer requires nonempty point sets");
  const KdTree tree_a(a), tree_b(b);
  const int na = static_cast<int>(a.rows()), nb = static_cast<int>(b.rows());

  std::vector<double> da(na), db(nb);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < na; ++i)
    da[i] = std::sqrt(tree_b.nearest(a.row(i)).dist_sq);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nb; ++j)
    db[j] = std::sqrt(tree_a.nearest(b.row(j)).dist_sq);

  double mean_a = 0.0, max_a = 0.0;
  for (int i = 0; i < na; ++i) {
    mean_a += da[i];
    max_a = std::max(max_a, da[i]);
  }
  mean_a /= na;
  double mean_b = 0.0, max_b = 0.0;
  for (int j = 0; j < nb; ++j) {
    mean_b += db[j];
    max_b = std::max(max_b, db[j]);
  }
  mean_b /= nb;
  return {0.5 * (mean_a + mean_b), std::max(max_a, max_b)};
}

ChamferHausdorff chamfer_and_hausdorff(const TriangleMesh& a,
                                       const TriangleMesh& b, int samples,
                                       std::uint64_t seed) {
  const SurfaceSamples sa = surface_samples(a, samples, seed);
  const SurfaceSamples sb = surface_samples(b, samples, seed);
  return chamfer_hausdorff_points(sa.points, sb.points);
}

double winding_number(const TriangleMesh& mesh, const Vec3& point) {
  double solid_angle = 0.0;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3 a = mesh.vertices.row(mesh.faces(f, 0)).transpose() - point;
    const Vec3 b = mesh.vertices.row(mesh.faces(f, 1)).transpose() - point;
    const Vec3 c = mesh.vertices.row(mesh.faces(f, 2)).transpose() - point;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double det = a.dot(b.cross(c));
    const double denom =
        la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    solid_angle += 2.0 * std::atan2(det, denom);
  }
  return solid_angle / (4.0 * M_PI);
}

VoxelGrid VoxelGrid::shared(const TriangleMesh& a, const TriangleMesh& b,
                            double spacing) {
  if (!(spacing > 0)) throw ValidationError("voxel spacing must be positive");
  Aabb box = a.bounding_box();
  const Aabb bb = b.bounding_box();
  box.expand(bb.lo);
  box.expand(bb.hi);
  VoxelGrid grid;
  grid.spacing = spacing;
  grid.origin = box.lo - Vec3::Constant(spacing);
  const Vec3 extent = box.hi + Vec3::Constant(spacing) - grid.origin;
  grid.nx = std::max(1, static_cast<int>(std::ceil(extent.x() / spacing)));
  grid.ny = std::max(1, static_cast<int>(std::ceil(extent.y() / spacing)));
  grid.nz = std::max(1, static_cast<int>(std::ceil(extent.z() / spacing)));
  return grid;
}

std::vector<char> voxelize(const TriangleMesh& mesh, const VoxelGrid& grid) {
  const long total = grid.total();
  std::vector<char> occupancy(total, 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (long v = 0; v < total; ++v) {
    const int iz = static_cast<int>(v % grid.nz);
    const int iy = static_cast<int>((v / grid.nz) % grid.ny);
    const int ix = static_cast<int>(v / (static_cast<long>(grid.ny) * grid.nz));
    const double w = winding_number(mesh, grid.center(ix, iy, iz));
    occupancy[v] = std::abs(w) >= 0.5 ? 1 : 0;
  }
  return occupancy;
}

double dice(const TriangleMesh& a, const TriangleMesh& b, double spacing) {
  for (const TriangleMesh* mesh : {&a, &b}) {
    const auto bad = boundary_edges(*mesh);
    if (!bad.empty())
      throw ValidationError(
          "dice requires closed, consistently oriented meshes (" +
          std::to_string(bad.size()) + " boundary edges)");
  }
  const VoxelGrid grid = VoxelGrid::shared(a, b, spacing);
  const auto occ_a = voxelize(a, grid);
  const auto occ_b = voxelize(b, grid);
  long count_a = 0, count_b = 0, overlap = 0;
  for (long v = 0; v < grid.total(); ++v) {
    count_a += occ_a[v];
    count_b += occ_b[v];
    overlap += occ_a[v] && occ_b[v];
  }
  if (count_a + count_b == 0) return 1.0;
  return 2.0 * static_cast<double>(overlap) /
         static_cast<double>(count_a + count_b);
}

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string quality_report_json(const QualityReport& report) {
  std::ostringstream oss;
  oss << "{\n  \"caps\": [";
  for (size_t i = 0; i < report.cap_names.size(); ++i) {
    if (i) oss << ",";
    oss << "\n    {\"name\": \"" << json_escape(report.cap_names[i])
        << "\", \"cwo\": " << fmt9(report.cap_cwo[i])
        << ", \"coplanarity_mm\": " << fmt9(report.cap_coplanarity_mm[i])
        << "}";
  }
  if (!report.cap_names.empty()) oss << "\n  ";
  oss << "],\n";
  oss << "  \"self_intersection_fraction\": "
      << fmt9(report.self_intersection_fraction) << ",\n";
  oss << "  \"chamfer_mm\": " << fmt9(report.chamfer_mm) << ",\n";
  oss << "  \"hausdorff_mm\": " << fmt9(report.hausdorff_mm);
  if (report.dice) oss << ",\n  \"dice\": " << fmt9(*report.dice);
  if (report.volume_mm3)
    oss << ",\n  \"volume_mm3\": " << fmt9(*report.volume_mm3);
  oss << "\n}\n";
  return oss.str();
}

}  // namespace cardiomesh
