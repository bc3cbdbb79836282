#include "cardiomesh/fit.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "cardiomesh/kdtree.hpp"
#include "cardiomesh/quality.hpp"

namespace cardiomesh {

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "gradient_descent_momentum" || name == "momentum")
    return Optimizer::gradient_descent_momentum;
  if (name == "adaptive_moments" || name == "adam")
    return Optimizer::adaptive_moments;
  throw ValidationError("unknown optimizer '" + name + "'");
}

std::string to_string(Optimizer opt) {
  return opt == Optimizer::gradient_descent_momentum
             ? "gradient_descent_momentum"
             : "adaptive_moments";
}

void FitConfig::validate(int vertex_count) const {
  if (schedule.empty()) throw ValidationError("fit schedule is empty");
  for (int c : schedule)
    if (c < 1 || c > vertex_count)
      throw ValidationError("schedule handle count " + std::to_string(c) +
                            " out of range [1, " +
                            std::to_string(vertex_count) + "]");
  for (size_t b = 1; b < schedule.size(); ++b)
    if (schedule[b] < schedule[b - 1])
      std::cerr << "warning: fit schedule decreases from " << schedule[b - 1]
                << " to " << schedule[b] << " handles at block " << b << "\n";
  if (iters_per_block < 1)
    throw ValidationError("iters_per_block must be positive");
  if (!(step_size > 0)) throw ValidationError("step_size must be positive");
  if (target_samples < 1)
    throw ValidationError("target_samples must be positive");
  loss.validate();
}

namespace {

// pooled target points for the trace metric
VertexMatrix pool_targets(const std::map<std::string, SurfaceSamples>& targets) {
  int total = 0;
  for (const auto& [name, s] : targets) total += s.count();
  VertexMatrix pooled(total, 3);
  int at = 0;
  for (const auto& [name, s] : targets) {
    pooled.middleRows(at, s.count()) = s.points;
    at += s.count();
  }
  return pooled;
}

// symmetric unsquared chamfer between vertices and pooled target points
double vertex_chamfer(const VertexMatrix& vertices, const KdTree& target_tree,
                      const VertexMatrix& target_points) {
  const int n = static_cast<int>(vertices.rows());
  const int nt = static_cast<int>(target_points.rows());
  std::vector<double> d(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    d[i] = std::sqrt(target_tree.nearest(vertices.row(i)).dist_sq);
  double mean_a = 0.0;
  for (int i = 0; i < n; ++i) mean_a += d[i];
  mean_a /= n;

  const KdTree vertex_tree(vertices);
  std::vector<double> e(nt);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nt; ++j)
    e[j] = std::sqrt(vertex_tree.nearest(target_points.row(j)).dist_sq);
  double mean_b = 0.0;
  for (int j = 0; j < nt; ++j) mean_b += e[j];
  mean_b /= nt;
  return 0.5 * (mean_a + mean_b);
}

FitMetrics compute_metrics(const TriangleMesh& mesh, const TemplateTags& tags,
                           const KdTree& target_tree,
                           const VertexMatrix& target_points) {
  FitMetrics metrics;
  metrics.chamfer = vertex_chamfer(mesh.vertices, target_tree, target_points);
  if (!tags.caps.empty()) {
    metrics.cap_cwo = cap_wall_orthogonality(mesh, tags);
    metrics.cap_coplanarity = cap_coplanarity(mesh, tags);
  }
  return metrics;
}

struct AdamState {
  VertexMatrix m, v;
  int step = 0;
};

}  // namespace

FitResult fit_handles(const TaggedMesh& template_mesh,
                      const EnergyMatrix& energy,
                      const std::map<std::string, SurfaceSamples>& targets,
                      const FitConfig& config) {
  const TriangleMesh& rest = template_mesh.mesh;
  config.validate(rest.vertex_count());
  rest.validate();
  template_mesh.tags.validate(rest);

  const double diag = rest.bounding_box().diagonal();
  const double step = config.step_size * (diag > 0 ? diag : 1.0);

  const VertexMatrix target_points = pool_targets(targets);
  if (target_points.rows() == 0)
    throw ValidationError("fit requires at least one nonempty target");
  const KdTree target_tree(target_points);

  FitResult result;
  TriangleMesh current = rest;
  result.metrics_before =
      compute_metrics(current, template_mesh.tags, target_tree, target_points);

  double initial_loss = 0.0;
  bool have_initial = false;
  int divergence_streak = 0;
  int global_iter = 0;

  for (size_t block = 0; block < config.schedule.size(); ++block) {
    const int handle_count = config.schedule[block];
    EnergyMatrix block_energy =
        (block == 0 || !config.recompute_energy_per_block)
            ? energy
            : build_energy(current, energy.kind);
    const HandleSet handles =
        sample_handles(current, handle_count, config.fps_start_index);
    const BiharmonicMap map = compute_biharmonic(block_energy, handles);

    VertexMatrix P = handles.positions(current.vertices);
    AdamState adam;
    adam.m = VertexMatrix::Zero(handle_count, 3);
    adam.v = VertexMatrix::Zero(handle_count, 3);
    VertexMatrix momentum = VertexMatrix::Zero(handle_count, 3);

    double best_loss = std::numeric_limits<double>::infinity();
    VertexMatrix best_P = P;

    TriangleMesh working = current;
    for (int iter = 0; iter < config.iters_per_block; ++iter, ++global_iter) {
      working.vertices = deform(map, P);
      const LossValue loss = total_mesh_loss(working, targets,
                                             template_mesh.tags, config.loss);
      if (!std::isfinite(loss.value))
        throw DivergenceError("loss became non-finite at iteration " +
                              std::to_string(global_iter));
      if (!have_initial) {
        initial_loss = loss.value;
        have_initial = true;
      }
      if (loss.value > 10.0 * initial_loss && initial_loss > 0) {
        if (++divergence_streak >= 50)
          throw DivergenceError(
              "loss exceeded 10x the initial value for 50 consecutive "
              "iterations (iteration " +
              std::to_string(global_iter) + ")");
      } else {
        divergence_streak = 0;
      }
      if (loss.value < best_loss) {
        best_loss = loss.value;
        best_P = P;
      }

      result.loss_trace.push_back(
          {global_iter, static_cast<int>(block), loss.value,
           vertex_chamfer(working.vertices, target_tree, target_points)});

      const VertexMatrix grad_P = map.W.transpose() * loss.gradient;
      if (config.optimizer == Optimizer::gradient_descent_momentum) {
        momentum = 0.9 * momentum - step * grad_P;
        P += momentum;
      } else {
        adam.step += 1;
        adam.m = 0.9 * adam.m + 0.1 * grad_P;
        adam.v = (0.999 * adam.v.array() +
                  0.001 * grad_P.array() * grad_P.array())
                     .matrix();
        const double bias_m = 1.0 - std::pow(0.9, adam.step);
        const double bias_v = 1.0 - std::pow(0.999, adam.step);
        P -= (step * (adam.m.array() / bias_m) /
              ((adam.v.array() / bias_v).sqrt() + 1e-8))
                 .matrix();
      }
    }

    current.vertices = deform(map, best_P);
    result.block_handles.push_back(handles);
    result.handle_trajectory.push_back(best_P);
    result.block_vertices.push_back(current.vertices);
  }

  result.final_vertices = current.vertices;
  result.initial_loss = initial_loss;
  result.final_loss =
      total_mesh_loss(current, targets, template_mesh.tags, config.loss).value;
  result.metrics_after =
      compute_metrics(current, template_mesh.tags, target_tree, target_points);
  return result;
}

GradientCheckResult gradient_check(
    const TaggedMesh& template_mesh,
    const std::map<std::string, SurfaceSamples>& targets,
    const LossWeights& weights, int probe_count, std::uint64_t seed) {
  if (probe_count < 1) throw ValidationError("probe_count must be >= 1");
  const TriangleMesh& rest = template_mesh.mesh;
  const int n = rest.vertex_count();

  const EnergyMatrix energy = build_energy(rest, EnergyKind::cotangent_squared);
  const HandleSet handles = sample_handles(rest, std::min(75, n), 0);
  const BiharmonicMap map = compute_biharmonic(energy, handles);
  const int c = handles.count();

  VertexMatrix P = handles.positions(rest.vertices);
  const double diag = rest.bounding_box().diagonal();
  const double fd_step = 1e-5 * std::max(1.0, diag);

  TriangleMesh working = rest;
  working.vertices = deform(map, P);
  const LossValue center =
      total_mesh_loss(working, targets, template_mesh.tags, weights);
  const VertexMatrix grad_P = map.W.transpose() * center.gradient;

  GradientCheckResult out;
  for (int probe = 0; probe < probe_count; ++probe) {
    const std::uint64_t bits = splitmix64(seed + 0x517cc1b727220a95ULL * probe);
    const int k = static_cast<int>(bits % c);
    const int axis = static_cast<int>((bits >> 32) % 3);

    VertexMatrix Pp = P, Pm = P;
    Pp(k, axis) += fd_step;
    Pm(k, axis) -= fd_step;
    working.vertices = deform(map, Pp);
    const LossValue lp =
        total_mesh_loss(working, targets, template_mesh.tags, weights);
    working.vertices = deform(map, Pm);
    const LossValue lm =
        total_mesh_loss(working, targets, template_mesh.tags, weights);

    const double margin =
        std::min({center.min_orthogonality_margin,
                  lp.min_orthogonality_margin, lm.min_orthogonality_margin});
    if (margin < 1e-3) {
      ++out.probes_skipped;
      continue;
    }

    const double fd = (lp.value - lm.value) / (2.0 * fd_step);
    const double analytic = grad_P(k, axis);
    const double rel = std::abs(fd - analytic) /
                       std::max({1e-6, std::abs(fd), std::abs(analytic)});
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.probes_evaluated;
  }
  return out;
}

void save_loss_trace_csv(const std::string& path,
                         const std::vector<TraceRow>& trace) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw ValidationError("cannot write trace CSV: " + path);
  std::fprintf(f, "iter,block,loss,chamfer\n");
  for (const auto& row : trace)
    std::fprintf(f, "%d,%d,%.17g,%.17g\n", row.iter, row.block, row.loss,
                 row.chamfer);
  std::fclose(f);
}

}  // namespace cardiomesh
