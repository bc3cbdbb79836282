#include "cardiomesh/reference.hpp"

#include <Eigen/Dense>

namespace cardiomesh::reference {

KdTree::Hit nearest_bruteforce(const VertexMatrix& points, const Vec3& query) {
  KdTree::Hit best;
  best.dist_sq = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points.rows(); ++i) {
    const double d2 = dist_sq(query, points.row(i));
    if (d2 < best.dist_sq || (d2 == best.dist_sq && i < best.index)) {
      best.dist_sq = d2;
      best.index = i;
    }
  }
  return best;
}

TriangleBvh::SurfaceHit closest_point_bruteforce(const TriangleMesh& mesh,
                                                 const Vec3& query) {
  TriangleBvh::SurfaceHit best;
  best.dist_sq = std::numeric_limits<double>::infinity();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const ClosestPoint cp = closest_point_on_triangle(
        query, mesh.vertices.row(mesh.faces(f, 0)),
        mesh.vertices.row(mesh.faces(f, 1)),
        mesh.vertices.row(mesh.faces(f, 2)));
    const double d2 = dist_sq(query, cp.point);
    if (d2 < best.dist_sq || (d2 == best.dist_sq && f < best.face)) {
      best.dist_sq = d2;
      best.face = f;
      best.point = cp.point;
      best.barycentric = cp.barycentric;
    }
  }
  return best;
}

std::vector<char> self_intersecting_faces_bruteforce(
    const TriangleMesh& mesh) {
  const int m = mesh.face_count();
  std::vector<char> flags(m, 0);
  for (int f = 0; f < m; ++f) {
    for (int g = f + 1; g < m; ++g) {
      bool adjacent = false;
      for (int a = 0; a < 3 && !adjacent; ++a)
        for (int b = 0; b < 3; ++b)
          if (mesh.faces(f, a) == mesh.faces(g, b)) {
            adjacent = true;
            break;
          }
      if (adjacent) continue;
      if (tri_tri_intersect(mesh.vertices.row(mesh.faces(f, 0)),
                            mesh.vertices.row(mesh.faces(f, 1)),
                            mesh.vertices.row(mesh.faces(f, 2)),
                            mesh.vertices.row(mesh.faces(g, 0)),
                            mesh.vertices.row(mesh.faces(g, 1)),
                            mesh.vertices.row(mesh.faces(g, 2)))) {
        flags[f] = 1;
        flags[g] = 1;
      }
    }
  }
  return flags;
}

LossValue point_consistency_serial(const TriangleMesh& mesh,
                                   const SurfaceSamples& target,
                                   const VectorXd& weights) {
  if (target.count() == 0)
    throw ValidationError("target samples are empty");
  const int n = mesh.vertex_count();
  const int nt = target.count();

  LossValue out;
  out.gradient = VertexMatrix::Zero(n, 3);

  double term1 = 0.0;
  std::vector<int> vertex_nn(n);
  for (int i = 0; i < n; ++i) {
    const auto hit = nearest_bruteforce(target.points, mesh.vertices.row(i));
    vertex_nn[i] = hit.index;
    term1 += weights[i] * hit.dist_sq;
  }
  term1 /= n;
  for (int i = 0; i < n; ++i) {
    const Vec3 diff = mesh.vertices.row(i) - target.points.row(vertex_nn[i]);
    out.gradient.row(i) += (2.0 * weights[i] / n) * diff.transpose();
  }

  double term2 = 0.0;
  std::vector<int> sample_nn(nt);
  for (int j = 0; j < nt; ++j) {
    const auto hit = nearest_bruteforce(mesh.vertices, target.points.row(j));
    sample_nn[j] = hit.index;
    term2 += hit.dist_sq;
  }
  term2 /= nt;
  for (int j = 0; j < nt; ++j) {
    const Vec3 diff = mesh.vertices.row(sample_nn[j]) - target.points.row(j);
    out.gradient.row(sample_nn[j]) += (2.0 / nt) * diff.transpose();
  }

  out.value = term1 + term2;
  return out;
}

std::vector<char> voxelize_serial(const TriangleMesh& mesh,
                                  const VoxelGrid& grid) {
  const long total = grid.total();
  std::vector<char> occupancy(total, 0);
  for (long v = 0; v < total; ++v) {
    const int iz = static_cast<int>(v % grid.nz);
    const int iy = static_cast<int>((v / grid.nz) % grid.ny);
    const int ix = static_cast<int>(v / (static_cast<long>(grid.ny) * grid.nz));
    const double w = winding_number(mesh, grid.center(ix, iy, iz));
    occupancy[v] = std::abs(w) >= 0.5 ? 1 : 0;
  }
  return occupancy;
}

Eigen::MatrixXd biharmonic_dense(const EnergyMatrix& energy,
                                 const HandleSet& handles) {
  const int n = static_cast<int>(energy.A.rows());
  handles.validate(n);
  const int c = handles.count();

  std::vector<int> handle_column(n, -1);
  for (int k = 0; k < c; ++k) handle_column[handles.indices[k]] = k;
  std::vector<int> free_list;
  for (int i = 0; i < n; ++i)
    if (handle_column[i] < 0) free_list.push_back(i);
  const int nf = static_cast<int>(free_list.size());

  const Eigen::MatrixXd A = Eigen::MatrixXd(energy.A);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, c);
  for (int k = 0; k < c; ++k) W(handles.indices[k], k) = 1.0;
  if (nf == 0) return W;

  Eigen::MatrixXd Aff(nf, nf), Afh(nf, c);
  for (int i = 0; i < nf; ++i) {
    for (int j = 0; j < nf; ++j) Aff(i, j) = A(free_list[i], free_list[j]);
    for (int k = 0; k < c; ++k)
      Afh(i, k) = A(free_list[i], handles.indices[k]);
  }
  const Eigen::MatrixXd X = Aff.ldlt().solve(-Afh);
  for (int i = 0; i < nf; ++i) W.row(free_list[i]) = X.row(i);
  return W;
}

}  // namespace cardiomesh::reference
