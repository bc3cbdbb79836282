#pragma once

#include <string>
#include <vector>

#include "cardiomesh/mesh.hpp"

namespace cardiomesh {

/// Time-stamped vertex arrays over a fixed connectivity.
struct MotionSequence {
  std::vector<VertexMatrix> frames;
  std::vector<double> times;  // strictly increasing, seconds
  bool periodic = false;
  double period = 0.0;  // required when periodic; times lie in [0, period)

  int frame_count() const { return static_cast<int>(frames.size()); }
  void validate() const;
};

enum class SplineBoundary { natural, periodic };

/// Per-vertex-per-coordinate cubic spline through the knot frames. C2 at
/// interior knots and exact at knots. Periodic splines match value and first
/// two derivatives across the wrap.
struct MotionSpline {
  std::vector<double> knots;
  std::vector<VertexMatrix> values;        // knot frames
  std::vector<VertexMatrix> second_derivs; // per knot
  SplineBoundary boundary = SplineBoundary::natural;
  double period = 0.0;

  int knot_count() const { return static_cast<int>(knots.size()); }
  int vertex_count() const {
    return values.empty() ? 0 : static_cast<int>(values[0].rows());
  }

  /// Evaluates all vertices at time t. Natural splines clamp t to the knot
  /// span; periodic splines wrap it.
  VertexMatrix evaluate(double t) const;
};

/// Natural boundary conditions when the sequence is aperiodic, periodic
/// otherwise.
MotionSpline build_motion_spline(const MotionSequence& seq);

/// Frames at t = 0, dt, 2dt, ... covering one period (periodic, endpoint
/// excluded) or the knot span (aperiodic, endpoint included).
MotionSequence sample_motion(const MotionSpline& spline, double dt);

/// Enclosed volume of the structure sub-mesh per frame. `faces` is the
/// shared connectivity of the sequence.
std::vector<std::pair<double, double>> volume_trace(
    const MotionSequence& seq, const FaceMatrix& faces,
    const std::vector<int>& structure_faces);

/// Directory layout: frame_0000.obj ... plus times.json
/// {"times":[...],"periodic":bool,"period":float}.
MotionSequence load_motion_sequence(const std::string& dir);
void save_motion_sequence(const std::string& dir, const MotionSequence& seq,
                          const FaceMatrix& faces);

void save_volume_trace_csv(
    const std::string& path,
    const std::vector<std::pair<double, double>>& trace);

}  // namespace cardiomesh
