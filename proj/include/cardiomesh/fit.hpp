#pragma once

#include <map>
#include <string>
#include <vector>

#include "cardiomesh/biharmonic.hpp"
#include "cardiomesh/losses.hpp"

namespace cardiomesh {

enum class Optimizer { gradient_descent_momentum, adaptive_moments };

Optimizer optimizer_from_string(const std::string& name);
std::string to_string(Optimizer opt);

struct FitConfig {
  std::vector<int> schedule{75, 75, 600};  // handle count per block
  int iters_per_block = 300;
  double step_size = 1e-2;  // fraction of the template bounding-box diagonal
  Optimizer optimizer = Optimizer::adaptive_moments;
  std::uint64_t seed = 0;
  LossWeights loss;
  // rebuild the energy (and always the map) on each block's deformed
  // geometry; turning this off reuses the rest-pose energy
  bool recompute_energy_per_block = true;
  int fps_start_index = 0;
  int target_samples = 20000;  // used by the CLI when sampling target meshes

  void validate(int vertex_count) const;
};

struct TraceRow {
  int iter = 0;   // global iteration index
  int block = 0;  // schedule block
  double loss = 0.0;
  double chamfer = 0.0;  // symmetric vertex/sample chamfer, mm
};

struct FitMetrics {
  double chamfer = 0.0;  // symmetric vertex/sample chamfer, mm
  std::vector<double> cap_cwo;          // per cap, tags order
  std::vector<double> cap_coplanarity;  // per cap, mm
};

struct FitResult {
  VertexMatrix final_vertices;
  std::vector<HandleSet> block_handles;
  std::vector<VertexMatrix> handle_trajectory;  // final P per block
  std::vector<VertexMatrix> block_vertices;     // mesh after each block
  std::vector<TraceRow> loss_trace;
  FitMetrics metrics_before;
  FitMetrics metrics_after;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Coarse-to-fine handle optimization: per block, farthest-point-sample the
/// configured number of handles on the current geometry, precompute the
/// biharmonic map, and minimize the total mesh loss over handle positions
/// with dL/dP = W^T dL/dV. Each block starts from the best mesh of the
/// previous one. Deterministic for a fixed config.
/// Throws DivergenceError when the loss exceeds 10x the initial loss for 50
/// consecutive iterations.
FitResult fit_handles(const TaggedMesh& template_mesh,
                      const EnergyMatrix& energy,
                      const std::map<std::string, SurfaceSamples>& targets,
                      const FitConfig& config);

struct GradientCheckResult {
  double max_rel_error = 0.0;
  int probes_evaluated = 0;
  int probes_skipped = 0;  // within 1e-3 of the orthogonality kink
};

/// Central finite differences of the total loss against the analytic
/// W^T-chained gradient at probe_count random handle coordinates.
GradientCheckResult gradient_check(
    const TaggedMesh& template_mesh,
    const std::map<std::string, SurfaceSamples>& targets,
    const LossWeights& weights, int probe_count, std::uint64_t seed);

void save_loss_trace_csv(const std::string& path,
                         const std::vector<TraceRow>& trace);

}  // namespace cardiomesh
