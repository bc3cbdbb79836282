#pragma once

#include <Eigen/Dense>

#include "cardiomesh/biharmonic.hpp"
#include "cardiomesh/bvh.hpp"
#include "cardiomesh/kdtree.hpp"
#include "cardiomesh/losses.hpp"
#include "cardiomesh/quality.hpp"

namespace cardiomesh::reference {

/// Serial, brute-force counterparts of the parallel kernels. They share the
/// per-element arithmetic with the production paths, so results must match
/// bitwise; tests and the benchmark rely on that.

/// Linear scan nearest neighbor, lowest index on ties.
KdTree::Hit nearest_bruteforce(const VertexMatrix& points, const Vec3& query);

/// Closest surface point over all faces, lowest face index on ties.
TriangleBvh::SurfaceHit closest_point_bruteforce(const TriangleMesh& mesh,
                                                 const Vec3& query);

/// All-pairs non-adjacent triangle intersection flags.
std::vector<char> self_intersecting_faces_bruteforce(const TriangleMesh& mesh);

/// Single-threaded brute-force chamfer loss, same accumulation order as the
/// parallel path.
LossValue point_consistency_serial(const TriangleMesh& mesh,
                                   const SurfaceSamples& target,
                                   const VectorXd& weights);

/// Serial voxel loop over the same winding-number test.
std::vector<char> voxelize_serial(const TriangleMesh& mesh,
                                  const VoxelGrid& grid);

/// Dense evaluation of the closed-form biharmonic map (no drop tolerance,
/// no renormalization): W = Q^T - T^T (T A T^T)^{-1} T A Q^T.
Eigen::MatrixXd biharmonic_dense(const EnergyMatrix& energy,
                                 const HandleSet& handles);

}  // namespace cardiomesh::reference
