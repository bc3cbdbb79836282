#pragma once

#include <map>
#include <set>
#include <string>

#include "cardiomesh/mesh.hpp"

namespace cardiomesh {

struct LossWeights {
  double alpha = 1.0;         // cap regularization weight
  double beta = 1.0;          // orthogonality sub-weight
  double lambda1 = 1.0;       // mapped-points mesh loss
  double lambda2 = 1.0;       // deformed-template mesh loss
  double lambda3 = 0.5;       // L2 consistency between the two
  double inlet_weight = 2.0;  // up-weight for inlet wall vertices

  void validate() const;
};

/// Loss value with its gradient with respect to vertex positions.
/// min_orthogonality_margin is the smallest |<n_wall, mean cap normal>| seen
/// while evaluating the orthogonality term (infinity when absent); callers
/// use it to recognize evaluations near the absolute-value kink.
struct LossValue {
  double value = 0.0;
  VertexMatrix gradient;
  double min_orthogonality_margin = std::numeric_limits<double>::infinity();
};

/// Symmetric chamfer with squared distances, mean per side:
/// mean_i w_i |v_i - nn_target(v_i)|^2 + mean_j |p_j - nn_vertices(p_j)|^2.
/// Correspondences are frozen within the evaluation; ties go to the lowest
/// index.
LossValue point_consistency(const TriangleMesh& mesh,
                            const SurfaceSamples& target,
                            const VectorXd& weights);

/// mean_f wbar_f (1 - <n_f, target normal at the sample nearest the face
/// centroid>), wbar_f = mean of the face's vertex weights. Gradient flows
/// through the face-normal normalization.
LossValue normal_consistency(const TriangleMesh& mesh,
                             const SurfaceSamples& target,
                             const VectorXd& weights);

/// sqrt((L_point + eps)(L_normal + eps)) - eps with eps = 1e-8.
LossValue geometric_consistency(const TriangleMesh& mesh,
                                const SurfaceSamples& target,
                                const VectorXd& weights);

/// sum_k sum_{j in cap k} |n_j - mean cap normal|^2 over unit face normals.
LossValue coplanar_energy(const TriangleMesh& mesh, const TemplateTags& tags);

/// sum_k sum_{j in wall k} |<n_j, mean cap normal>|; subgradient zero at the
/// kink.
LossValue orthogonal_energy(const TriangleMesh& mesh,
                            const TemplateTags& tags);

struct L2Consistency {
  double value = 0.0;
  VertexMatrix gradient_first;   // d/dS
  VertexMatrix gradient_second;  // d/dV
};

/// Frobenius-squared distance |S - V|_F^2 with gradients for both arguments.
L2Consistency l2_consistency(const VertexMatrix& S, const VertexMatrix& V);

/// Per-vertex weights used inside the geometric consistency loss: the tag
/// weights, scaled by inlet_weight on inlet-cap wall vertices and zeroed for
/// vertices outside the axis-aligned bounding box of all target samples
/// (expanded by 1%).
VectorXd effective_vertex_weights(
    const TriangleMesh& mesh, const TemplateTags& tags,
    const std::map<std::string, SurfaceSamples>& targets, double inlet_weight);

/// Total mesh loss: sum of per-structure geometric consistency plus
/// alpha * (coplanar + beta * orthogonal) over the caps. Structures without
/// a target raise ValidationError unless listed in `unsupervised`.
LossValue total_mesh_loss(const TriangleMesh& mesh,
                          const std::map<std::string, SurfaceSamples>& targets,
                          const TemplateTags& tags, const LossWeights& weights,
                          const std::set<std::string>& unsupervised = {});

}  // namespace cardiomesh
