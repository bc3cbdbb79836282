#include "cardiomesh/energy.hpp"

#include <map>
#include <vector>

namespace cardiomesh {

namespace {

Eigen::SparseMatrix<double> laplacian_from_edge_weights(
    int n, const std::map<std::pair<int, int>, double>& weights) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * weights.size());
  std::vector<double> diagonal(n, 0.0);
  for (const auto& [edge, w] : weights) {
    triplets.emplace_back(edge.first, edge.second, -w);
    triplets.emplace_back(edge.second, edge.first, -w);
    diagonal[edge.first] += w;
    diagonal[edge.second] += w;
  }
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, diagonal[i]);
  Eigen::SparseMatrix<double> L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());
  return L;
}

}  // namespace

EnergyMatrix build_energy(const TriangleMesh& mesh, EnergyKind kind) {
  mesh.validate();
  const int n = mesh.vertex_count();
  std::map<std::pair<int, int>, double> weights;
  Eigen::VectorXd mass_inv = Eigen::VectorXd::Ones(n);

  if (kind == EnergyKind::uniform_squared) {
    for (int f = 0; f < mesh.face_count(); ++f) {
      for (int k = 0; k < 3; ++k) {
        int a = mesh.faces(f, k), b = mesh.faces(f, (k + 1) % 3);
        if (a > b) std::swap(a, b);
        weights[{a, b}] = 1.0;
      }
    }
  } else {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
    for (int f = 0; f < mesh.face_count(); ++f) {
      const Vec3 v0 = mesh.vertices.row(mesh.faces(f, 0));
      const Vec3 v1 = mesh.vertices.row(mesh.faces(f, 1));
      const Vec3 v2 = mesh.vertices.row(mesh.faces(f, 2));
      const double area2 = (v1 - v0).cross(v2 - v0).norm();
      if (area2 < 1e-12)
        throw ValidationError("face " + std::to_string(f) +
                              " is degenerate; cotangent energy undefined");
      for (int k = 0; k < 3; ++k) {
        // cot of the angle opposite edge (k, k+1), at vertex k+2
        const Vec3 apex = mesh.vertices.row(mesh.faces(f, (k + 2) % 3));
        const Vec3 ea = mesh.vertices.row(mesh.faces(f, k)).transpose() - apex;
        const Vec3 eb = mesh.vertices.row(mesh.faces(f, (k + 1) % 3)).transpose() - apex;
        const double cot = ea.dot(eb) / ea.cross(eb).norm();
        int a = mesh.faces(f, k), b = mesh.faces(f, (k + 1) % 3);
        if (a > b) std::swap(a, b);
        weights[{a, b}] += 0.5 * cot;
        mass[mesh.faces(f, k)] += area2 / 12.0;  // area/3 per corner
      }
    }
    for (auto& [edge, w] : weights) w = std::clamp(w, 1e-6, 1e6);
    for (int i = 0; i < n; ++i)
      mass_inv[i] = mass[i] > 0 ? 1.0 / mass[i] : 1.0;
  }

  const Eigen::SparseMatrix<double> L = laplacian_from_edge_weights(n, weights);
  Eigen::SparseMatrix<double> A = L.transpose() * mass_inv.asDiagonal() * L;
  // the product is symmetric up to rounding; symmetrize exactly
  Eigen::SparseMatrix<double> At = A.transpose();
  A = 0.5 * (A + At);
  A.makeCompressed();
  return {std::move(A), kind};
}

EnergyKind energy_kind_from_string(const std::string& name) {
  if (name == "cotan" || name == "cotangent") return EnergyKind::cotangent_squared;
  if (name == "uniform") return EnergyKind::uniform_squared;
  throw ValidationError("unknown energy kind '" + name +
                        "' (expected 'cotan' or 'uniform')");
}

std::string to_string(EnergyKind kind) {
  return kind == EnergyKind::cotangent_squared ? "cotan" : "uniform";
}

}  // namespace cardiomesh
