#pragma once

#include <Eigen/Sparse>
#include <string>

#include "cardiomesh/energy.hpp"
#include "cardiomesh/handles.hpp"

namespace cardiomesh {

/// Linear map W from handle positions to all vertex positions, V = W P.
/// Rows at handle vertices are one-hot and every row sums to one.
struct BiharmonicMap {
  Eigen::SparseMatrix<double, Eigen::RowMajor> W;  // n x c, compressed
  HandleSet handle_set;
  int source_vertex_count = 0;

  int handle_count() const { return static_cast<int>(W.cols()); }

  /// Checks the one-hot handle rows and unit row sums at 1e-8.
  void validate() const;
};

/// Closed-form solve: one symmetric factorization of the free-free block of
/// the energy, then one solve per handle column (solved in parallel).
/// Columns computed densely, entries below 1e-10 of the column max dropped,
/// rows renormalized to preserve unit sums. Throws SolverError when a
/// connected component has no handle or the factorization fails.
BiharmonicMap compute_biharmonic(const EnergyMatrix& energy,
                                 const HandleSet& handles);

/// V = W P. Handle rows reproduce P exactly.
VertexMatrix deform(const BiharmonicMap& map,
                    const VertexMatrix& handle_positions);

/// Re-targets W onto another mesh lying on or near the source surface: each
/// target vertex takes the barycentric combination of the W rows of its
/// closest source face. Row sums stay one. max_distance_out, when non-null,
/// receives the largest target-to-surface distance found.
BiharmonicMap transfer_map(const BiharmonicMap& map,
                           const TriangleMesh& source,
                           const TriangleMesh& target,
                           double* max_distance_out = nullptr);

/// BHC1 container: magic "BHC1"; u64 n, c, nnz; u64 row_ptr[n+1];
/// u64 col_idx[nnz]; f64 values[nnz]; u64 handles[c]. Little-endian,
/// bit-exact round trip.
void save_bhc(const std::string& path, const BiharmonicMap& map);
BiharmonicMap load_bhc(const std::string& path);

}  // namespace cardiomesh
