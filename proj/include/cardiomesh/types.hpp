#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace cardiomesh {

using Vec3 = Eigen::Vector3d;
using VertexMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using FaceMatrix = Eigen::Matrix<int, Eigen::Dynamic, 3>;
using VectorXd = Eigen::VectorXd;

/// Invalid or inconsistent input (bad file, index out of range, shape
/// mismatch). CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (singular factorization, component without a handle).
/// CLI maps this to exit code 3.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Optimization blow-up. CLI maps this to exit code 4.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Aabb {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double diagonal() const { return (hi - lo).norm(); }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  static Aabb of(const VertexMatrix& points);
};

// splitmix64: counter-based PRNG used wherever reproducibility across thread
// counts matters. Each consumer derives an independent stream from
// (seed, index), so parallel loops stay bitwise deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from a 64-bit state.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// k-th draw of the stream identified by seed.
inline double uniform01_at(std::uint64_t seed, std::uint64_t k) {
  return uniform01(splitmix64(seed * 0x9e3779b97f4a7c15ULL + k));
}

}  // namespace cardiomesh
