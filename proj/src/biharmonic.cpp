#include "cardiomesh/biharmonic.hpp"

#include <Eigen/SparseCholesky>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "cardiomesh/bvh.hpp"

namespace cardiomesh {

void BiharmonicMap::validate() const {
  const int n = static_cast<int>(W.rows());
  const int c = static_cast<int>(W.cols());
  handle_set.validate(std::max(source_vertex_count, c));
  if (n != source_vertex_count || c != handle_set.count())
    throw ValidationError("biharmonic map dimensions inconsistent");

  std::vector<int> handle_column(n, -1);
  for (int k = 0; k < c; ++k) {
    const int h = handle_set.indices[k];
    if (h < n) handle_column[h] = k;
  }

  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(W, i);
         it; ++it) {
      row_sum += it.value();
      if (handle_column[i] >= 0) {
        const double expect = it.col() == handle_column[i] ? 1.0 : 0.0;
        if (std::abs(it.value() - expect) > 1e-8)
          throw ValidationError("handle row " + std::to_string(i) +
                                " is not one-hot");
      }
    }
    if (std::abs(row_sum - 1.0) > 1e-8)
      throw ValidationError("row " + std::to_string(i) +
                            " does not sum to one");
  }
}

namespace {

// components of the adjacency graph of A; identical to the mesh components
// since the squared Laplacian only couples vertices within two rings
std::pair<std::vector<int>, int> pattern_components(
    const Eigen::SparseMatrix<double>& A) {
  const int n = static_cast<int>(A.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      const int a = find(static_cast<int>(it.row()));
      const int b = find(static_cast<int>(it.col()));
      if (a != b) parent[a] = b;
    }
  std::vector<int> component(n, -1);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (component[root] < 0) component[root] = count++;
    component[i] = component[root];
  }
  return {component, count};
}

}  // namespace

BiharmonicMap compute_biharmonic(const EnergyMatrix& energy,
                                 const HandleSet& handles) {
  const int n = static_cast<int>(energy.A.rows());
  handles.validate(n);

  const auto [component, num_components] = pattern_components(energy.A);
  {
    std::vector<char> covered(num_components, 0);
    for (int h : handles.indices) covered[component[h]] = 1;
    std::vector<int> missing;
    for (int cidx = 0; cidx < num_components; ++cidx)
      if (!covered[cidx]) missing.push_back(cidx);
    if (!missing.empty()) {
      std::ostringstream oss;
      oss << "mesh has " << num_components
          << " connected components; components without a handle:";
      for (int cidx : missing) oss << " " << cidx;
      throw SolverError(oss.str());
    }
  }

  const int c = handles.count();
  std::vector<int> handle_column(n, -1);
  for (int k = 0; k < c; ++k) handle_column[handles.indices[k]] = k;
  std::vector<int> free_index;
  free_index.reserve(n - c);
  std::vector<int> free_of_vertex(n, -1);
  for (int i = 0; i < n; ++i)
    if (handle_column[i] < 0) {
      free_of_vertex[i] = static_cast<int>(free_index.size());
      free_index.push_back(i);
    }
  const int nf = static_cast<int>(free_index.size());

  Eigen::MatrixXd X;  // nf x c solution of (T A T^T) X = -T A Q^T
  if (nf > 0) {
    std::vector<Eigen::Triplet<double>> tff, tfh;
    for (int col = 0; col < energy.A.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(energy.A, col); it;
           ++it) {
        const int i = static_cast<int>(it.row());
        const int j = static_cast<int>(it.col());
        if (free_of_vertex[i] < 0) continue;
        if (free_of_vertex[j] >= 0)
          tff.emplace_back(free_of_vertex[i], free_of_vertex[j], it.value());
        else
          tfh.emplace_back(free_of_vertex[i], handle_column[j], it.value());
      }
    }
    Eigen::SparseMatrix<double> Aff(nf, nf), Afh(nf, c);
    Aff.setFromTriplets(tff.begin(), tff.end());
    Afh.setFromTriplets(tfh.begin(), tfh.end());

    double trace = 0.0;
    for (int i = 0; i < nf; ++i) trace += Aff.coeff(i, i);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.setShift(1e-12 * trace / std::max(nf, 1));
    ldlt.compute(Aff);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("free-free energy block factorization failed");

    X.resize(nf, c);
    bool solve_failed = false;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < c; ++k) {
      const Eigen::VectorXd rhs = -Afh.col(k);
      X.col(k) = ldlt.solve(rhs);
      if (!X.col(k).allFinite()) solve_failed = true;
    }
    if (solve_failed)
      throw SolverError("biharmonic solve produced non-finite values");
  }

  // assemble: one-hot handle rows, dropped + renormalized free rows
  Eigen::VectorXd column_max = Eigen::VectorXd::Zero(c);
  if (nf > 0)
    for (int k = 0; k < c; ++k)
      column_max[k] = X.col(k).cwiseAbs().maxCoeff();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(n) * 4);
  for (int i = 0; i < n; ++i) {
    if (handle_column[i] >= 0) {
      triplets.emplace_back(i, handle_column[i], 1.0);
      continue;
    }
    const int fi = free_of_vertex[i];
    double row_sum = 0.0;
    for (int k = 0; k < c; ++k) {
      const double w = X(fi, k);
      if (std::abs(w) >= 1e-10 * column_max[k]) row_sum += w;
    }
    if (std::abs(row_sum) < 0.5)
      throw SolverError("row " + std::to_string(i) +
                        " of the biharmonic map is numerically degenerate");
    for (int k = 0; k < c; ++k) {
      const double w = X(fi, k);
      if (std::abs(w) >= 1e-10 * column_max[k])
        triplets.emplace_back(i, k, w / row_sum);
    }
  }

  BiharmonicMap map;
  map.W.resize(n, c);
  map.W.setFromTriplets(triplets.begin(), triplets.end());
  map.W.makeCompressed();
  map.handle_set = handles;
  map.source_vertex_count = n;
  return map;
}

VertexMatrix deform(const BiharmonicMap& map,
                    const VertexMatrix& handle_positions) {
  if (handle_positions.rows() != map.W.cols())
    throw ValidationError("handle position count " +
                          std::to_string(handle_positions.rows()) +
                          " does not match map columns " +
                          std::to_string(map.W.cols()));
  if (!handle_positions.allFinite())
    throw ValidationError("handle positions must be finite");
  const int n = static_cast<int>(map.W.rows());
  VertexMatrix V(n, 3);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Vec3 acc = Vec3::Zero();
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             map.W, i);
         it; ++it)
      acc += it.value() * handle_positions.row(it.col()).transpose();
    V.row(i) = acc;
  }
  return V;
}

BiharmonicMap transfer_map(const BiharmonicMap& map,
                           const TriangleMesh& source,
                           const TriangleMesh& target,
                           double* max_distance_out) {
  if (source.vertex_count() != map.source_vertex_count)
    throw ValidationError("source mesh does not match the map");
  if (target.vertex_count() == 0)
    throw ValidationError("target mesh is empty");

  const TriangleBvh bvh(source);
  const int nt = target.vertex_count();
  const int c = static_cast<int>(map.W.cols());

  std::vector<TriangleBvh::SurfaceHit> hits(nt);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nt; ++i)
    hits[i] = bvh.closest_point(target.vertices.row(i));

  double max_dist = 0.0;
  for (const auto& hit : hits)
    max_dist = std::max(max_dist, std::sqrt(hit.dist_sq));
  if (max_distance_out) *max_distance_out = max_dist;

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> row(c);
  for (int i = 0; i < nt; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    const auto& hit = hits[i];
    for (int k = 0; k < 3; ++k) {
      const double b = hit.barycentric[k];
      if (b == 0.0) continue;
      const int src_vertex = source.faces(hit.face, k);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
               map.W, src_vertex);
           it; ++it)
        row[it.col()] += b * it.value();
    }
    for (int k = 0; k < c; ++k)
      if (row[k] != 0.0) triplets.emplace_back(i, k, row[k]);
  }

  BiharmonicMap out;
  out.W.resize(nt, c);
  out.W.setFromTriplets(triplets.begin(), triplets.end());
  out.W.makeCompressed();
  out.handle_set = map.handle_set;
  out.source_vertex_count = nt;
  return out;
}

namespace {

void write_u64(std::FILE* f, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  std::fwrite(buf, 1, 8, f);
}

void write_f64(std::FILE* f, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(f, bits);
}

std::uint64_t read_u64(std::FILE* f) {
  unsigned char buf[8];
  if (std::fread(buf, 1, 8, f) != 8)
    throw ValidationError("BHC1 file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double read_f64(std::FILE* f) {
  const std::uint64_t bits = read_u64(f);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

struct FileCloser {
  std::FILE* f;
  ~FileCloser() {
    if (f) std::fclose(f);
  }
};

}  // namespace

void save_bhc(const std::string& path, const BiharmonicMap& map) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ValidationError("cannot write BHC1 file: " + path);
  FileCloser closer{f};
  std::fwrite("BHC1", 1, 4, f);
  const std::uint64_t n = map.W.rows(), c = map.W.cols(),
                      nnz = map.W.nonZeros();
  write_u64(f, n);
  write_u64(f, c);
  write_u64(f, nnz);
  for (std::uint64_t i = 0; i <= n; ++i)
    write_u64(f, static_cast<std::uint64_t>(map.W.outerIndexPtr()[i]));
  for (std::uint64_t k = 0; k < nnz; ++k)
    write_u64(f, static_cast<std::uint64_t>(map.W.innerIndexPtr()[k]));
  for (std::uint64_t k = 0; k < nnz; ++k) write_f64(f, map.W.valuePtr()[k]);
  for (int h : map.handle_set.indices)
    write_u64(f, static_cast<std::uint64_t>(h));
}

BiharmonicMap load_bhc(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ValidationError("cannot open BHC1 file: " + path);
  FileCloser closer{f};
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "BHC1", 4) != 0)
    throw ValidationError("not a BHC1 file: " + path);

  const std::uint64_t n = read_u64(f);
  const std::uint64_t c = read_u64(f);
  const std::uint64_t nnz = read_u64(f);
  std::vector<std::uint64_t> row_ptr(n + 1);
  for (auto& v : row_ptr) v = read_u64(f);
  if (row_ptr[0] != 0 || row_ptr[n] != nnz)
    throw ValidationError("BHC1 row pointers inconsistent");
  std::vector<std::uint64_t> col_idx(nnz);
  for (auto& v : col_idx) {
    v = read_u64(f);
    if (v >= c) throw ValidationError("BHC1 column index out of range");
  }
  std::vector<double> values(nnz);
  for (auto& v : values) v = read_f64(f);

  BiharmonicMap map;
  map.handle_set.indices.resize(c);
  for (auto& h : map.handle_set.indices) h = static_cast<int>(read_u64(f));

  map.W.resize(n, c);
  map.W.resizeNonZeros(nnz);
  for (std::uint64_t i = 0; i <= n; ++i)
    map.W.outerIndexPtr()[i] = static_cast<int>(row_ptr[i]);
  for (std::uint64_t k = 0; k < nnz; ++k) {
    map.W.innerIndexPtr()[k] = static_cast<int>(col_idx[k]);
    map.W.valuePtr()[k] = values[k];
  }
  map.source_vertex_count = static_cast<int>(n);
  return map;
}

}  // namespace cardiomesh
