#pragma once

#include <Eigen/Sparse>

#include "cardiomesh/mesh.hpp"

namespace cardiomesh {

enum class EnergyKind { cotangent_squared, uniform_squared };

/// Quadratic form of the squared Laplacian energy: A = L^T M^{-1} L with L
/// the chosen Laplacian and M the barycentric lumped mass (identity for the
/// uniform kind). Symmetric positive semi-definite with A 1 = 0.
struct EnergyMatrix {
  Eigen::SparseMatrix<double> A;
  EnergyKind kind = EnergyKind::cotangent_squared;
};

/// Cotangent weights are clamped to [1e-6, 1e6] per edge; the uniform kind
/// uses the graph Laplacian with unit mass.
EnergyMatrix build_energy(const TriangleMesh& mesh, EnergyKind kind);

EnergyKind energy_kind_from_string(const std::string& name);
std::string to_string(EnergyKind kind);

}  // namespace cardiomesh
