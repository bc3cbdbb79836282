#include "cardiomesh/motion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cardiomesh/obj_io.hpp"

namespace cardiomesh {

void MotionSequence::validate() const {
  if (frames.size() < 2)
    throw ValidationError("motion sequence needs at least 2 frames");
  if (times.size() != frames.size())
    throw ValidationError("times and frames lengths differ");
  const Eigen::Index n = frames[0].rows();
  for (const auto& f : frames)
    if (f.rows() != n)
      throw ValidationError("frames have inconsistent vertex counts");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ValidationError("times must be strictly increasing");
  if (periodic) {
    if (!(period > 0)) throw ValidationError("periodic sequence needs a period");
    if (times.front() < 0 || times.back() >= period)
      throw ValidationError("periodic times must lie in [0, period)");
  }
}

namespace {

// Tridiagonal-style system for knot second derivatives, built once per
// sequence (it depends only on the knot times) and solved for all 3n
// coordinate trajectories at once.
Eigen::MatrixXd knot_matrix(const std::vector<double>& t, bool periodic,
                            double period) {
  const int K = static_cast<int>(t.size());
  if (!periodic) {
    // unknowns: interior second derivatives (natural ends are zero)
    const int u = K - 2;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(u, u);
    for (int i = 1; i <= K - 2; ++i) {
      const double h0 = t[i] - t[i - 1];
      const double h1 = t[i + 1] - t[i];
      const int r = i - 1;
      if (r > 0) M(r, r - 1) = h0 / 6.0;
      M(r, r) = (h0 + h1) / 3.0;
      if (r < u - 1) M(r, r + 1) = h1 / 6.0;
    }
    return M;
  }
  // cyclic: K unknowns, interval K-1 wraps to knot 0 at t0 + period
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K, K);
  auto h = [&](int i) {
    return i == K - 1 ? t[0] + period - t[K - 1] : t[i + 1] - t[i];
  };
  for (int i = 0; i < K; ++i) {
    const double h0 = h((i + K - 1) % K);
    const double h1 = h(i);
    M(i, (i + K - 1) % K) += h0 / 6.0;
    M(i, i) += (h0 + h1) / 3.0;
    M(i, (i + 1) % K) += h1 / 6.0;
  }
  return M;
}

}  // namespace

MotionSpline build_motion_spline(const MotionSequence& seq) {
  seq.validate();
  const int K = seq.frame_count();
  const int n = static_cast<int>(seq.frames[0].rows());

  MotionSpline spline;
  spline.knots = seq.times;
  spline.values = seq.frames;
  spline.boundary =
      seq.periodic ? SplineBoundary::periodic : SplineBoundary::natural;
  spline.period = seq.period;
  spline.second_derivs.assign(K, VertexMatrix::Zero(n, 3));

  const bool periodic = seq.periodic;
  const int unknowns = periodic ? K : K - 2;
  if (unknowns <= 0) return spline;  // two aperiodic knots: linear

  const Eigen::MatrixXd M = knot_matrix(seq.times, periodic, seq.period);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

  auto slope = [&](int i, int col) -> Eigen::VectorXd {
    // (y_{i+1} - y_i) / h_i as a length-n vector for a coordinate column
    if (i == K - 1) {
      const double h = seq.times[0] + seq.period - seq.times[K - 1];
      return (seq.frames[0].col(col) - seq.frames[K - 1].col(col)) / h;
    }
    const double h = seq.times[i + 1] - seq.times[i];
    return (seq.frames[i + 1].col(col) - seq.frames[i].col(col)) / h;
  };

  for (int col = 0; col < 3; ++col) {
    Eigen::MatrixXd rhs(unknowns, n);
    if (!periodic) {
      for (int i = 1; i <= K - 2; ++i)
        rhs.row(i - 1) = (slope(i, col) - slope(i - 1, col)).transpose();
    } else {
      for (int i = 0; i < K; ++i)
        rhs.row(i) = (slope(i, col) - slope((i + K - 1) % K, col)).transpose();
    }
    const Eigen::MatrixXd sol = lu.solve(rhs);
    if (!periodic) {
      for (int i = 1; i <= K - 2; ++i)
        spline.second_derivs[i].col(col) = sol.row(i - 1).transpose();
    } else {
      for (int i = 0; i < K; ++i)
        spline.second_derivs[i].col(col) = sol.row(i).transpose();
    }
  }
  return spline;
}

VertexMatrix MotionSpline::evaluate(double t) const {
  const int K = knot_count();
  const int n = vertex_count();
  const bool periodic = boundary == SplineBoundary::periodic;

  if (periodic) {
    t = t - period * std::floor(t / period);
  } else {
    t = std::clamp(t, knots.front(), knots.back());
  }

  // locate the interval [knots[i], right)
  int i;
  double right_t;
  const VertexMatrix* right_y;
  const VertexMatrix* right_m;
  if (periodic && (t >= knots.back() || t < knots.front())) {
    i = K - 1;
    right_t = knots.front() + period;
    right_y = &values[0];
    right_m = &second_derivs[0];
    if (t < knots.front()) t += period;
  } else {
    i = static_cast<int>(std::upper_bound(knots.begin(), knots.end(), t) -
                         knots.begin()) -
        1;
    i = std::clamp(i, 0, K - 2);
    right_t = knots[i + 1];
    right_y = &values[i + 1];
    right_m = &second_derivs[i + 1];
  }

  const double h = right_t - knots[i];
  const double A = (right_t - t) / h;
  const double B = (t - knots[i]) / h;
  const double ca = (A * A * A - A) * h * h / 6.0;
  const double cb = (B * B * B - B) * h * h / 6.0;

  VertexMatrix out(n, 3);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < n; ++v)
    out.row(v) = A * values[i].row(v) + B * right_y->row(v) +
                 ca * second_derivs[i].row(v) + cb * right_m->row(v);
  return out;
}

MotionSequence sample_motion(const MotionSpline& spline, double dt) {
  if (!(dt > 0)) throw ValidationError("dt must be positive");
  const bool periodic = spline.boundary == SplineBoundary::periodic;
  const double span = periodic
                          ? spline.period
                          : spline.knots.back() - spline.knots.front();
  if (dt > span + 1e-12 * std::max(1.0, span))
    throw ValidationError("dt is larger than the sequence span");

  MotionSequence out;
  out.periodic = periodic;
  out.period = spline.period;

  long count;
  if (periodic) {
    count = static_cast<long>(std::floor(spline.period / dt + 1e-9));
  } else {
    count = static_cast<long>(std::floor(span / dt + 1e-9)) + 1;
  }
  out.frames.reserve(count);
  out.times.reserve(count);
  const double t0 = periodic ? 0.0 : spline.knots.front();
  for (long k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    out.times.push_back(t);
    out.frames.push_back(spline.evaluate(t));
  }
  return out;
}

std::vector<std::pair<double, double>> volume_trace(
    const MotionSequence& seq, const FaceMatrix& faces,
    const std::vector<int>& structure_faces) {
  seq.validate();
  TriangleMesh shape;
  shape.vertices = seq.frames[0];
  shape.faces = faces;
  const SubMesh sub = extract_submesh(shape, structure_faces);

  TriangleMesh frame_mesh;
  frame_mesh.faces = sub.mesh.faces;
  frame_mesh.vertices.resize(sub.vertex_map.size(), 3);

  std::vector<std::pair<double, double>> trace;
  trace.reserve(seq.frames.size());
  for (int f = 0; f < seq.frame_count(); ++f) {
    for (size_t i = 0; i < sub.vertex_map.size(); ++i)
      frame_mesh.vertices.row(i) = seq.frames[f].row(sub.vertex_map[i]);
    try {
      trace.emplace_back(seq.times[f], enclosed_volume(frame_mesh).volume);
    } catch (const ValidationError& e) {
      throw ValidationError("frame " + std::to_string(f) + ": " + e.what());
    }
  }
  return trace;
}

namespace {

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d.obj", index);
  return buf;
}

}  // namespace

MotionSequence load_motion_sequence(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path times_path = fs::path(dir) / "times.json";
  std::ifstream in(times_path);
  if (!in)
    throw ValidationError("cannot open " + times_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(times_path.string() + ": " + e.what());
  }

  MotionSequence seq;
  for (const auto& t : j.at("times")) seq.times.push_back(t.get<double>());
  seq.periodic = j.value("periodic", false);
  seq.period = j.value("period", 0.0);

  for (size_t i = 0; i < seq.times.size(); ++i) {
    const fs::path frame_path = fs::path(dir) / frame_name(static_cast<int>(i));
    if (!fs::exists(frame_path))
      throw ValidationError("missing frame file " + frame_path.string());
    seq.frames.push_back(load_obj(frame_path.string()).vertices);
  }
  seq.validate();
  return seq;
}

void save_motion_sequence(const std::string& dir, const MotionSequence& seq,
                          const FaceMatrix& faces) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  TriangleMesh mesh;
  mesh.faces = faces;
  for (int i = 0; i < seq.frame_count(); ++i) {
    mesh.vertices = seq.frames[i];
    save_obj((fs::path(dir) / frame_name(i)).string(), mesh);
  }
  nlohmann::json j;
  j["times"] = seq.times;
  j["periodic"] = seq.periodic;
  j["period"] = seq.period;
  std::ofstream out(fs::path(dir) / "times.json");
  if (!out) throw ValidationError("cannot write times.json in " + dir);
  out << j.dump(2) << "\n";
}

void save_volume_trace_csv(
    const std::string& path,
    const std::vector<std::pair<double, double>>& trace) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ValidationError("cannot write volume trace: " + path);
  std::fprintf(f, "t,volume_mm3\n");
  for (const auto& [t, v] : trace) std::fprintf(f, "%.17g,%.17g\n", t, v);
  std::fclose(f);
}

}  // namespace cardiomesh
