#include "cardiomesh/losses.hpp"

#include <cmath>

#include "cardiomesh/kdtree.hpp"

namespace cardiomesh {

namespace {

constexpr double kGeoEps = 1e-8;

void check_target(const SurfaceSamples& target) {
  if (target.count() == 0) throw ValidationError("target samples are empty");
}

void check_unit_normals(const SurfaceSamples& target) {
  for (int j = 0; j < target.count(); ++j)
    if (std::abs(target.normals.row(j).norm() - 1.0) > 1e-9)
      throw ValidationError("target normal " + std::to_string(j) +
                            " is not unit length");
}

// Scatters d(loss)/d(unit normal of face f) onto the face's vertices, through
// the normalization n = c/|c| of the edge cross product c.
void accumulate_face_normal_gradient(const TriangleMesh& mesh, int f,
                                     const Vec3& grad_unit_normal,
                                     VertexMatrix& grad) {
  const Vec3 v0 = mesh.vertices.row(mesh.faces(f, 0));
  const Vec3 v1 = mesh.vertices.row(mesh.faces(f, 1));
  const Vec3 v2 = mesh.vertices.row(mesh.faces(f, 2));
  const Vec3 e1 = v1 - v0, e2 = v2 - v0;
  const Vec3 c = e1.cross(e2);
  const double len = c.norm();
  if (len < 1e-12)
    throw ValidationError("face " + std::to_string(f) +
                          " is degenerate (zero area)");
  const Vec3 n = c / len;
  const Vec3 g_c = (grad_unit_normal - n * n.dot(grad_unit_normal)) / len;
  grad.row(mesh.faces(f, 0)) += g_c.cross(e2 - e1).transpose();
  grad.row(mesh.faces(f, 1)) += e2.cross(g_c).transpose();
  grad.row(mesh.faces(f, 2)) += g_c.cross(e1).transpose();
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {alpha, beta, lambda1, lambda2, lambda3, inlet_weight})
    if (!std::isfinite(v) || v < 0)
      throw ValidationError("loss weights must be finite and nonnegative");
}

LossValue point_consistency(const TriangleMesh& mesh,
                            const SurfaceSamples& target,
                            const VectorXd& weights) {
  check_target(target);
  const int n = mesh.vertex_count();
  const int nt = target.count();
  if (weights.size() != n)
    throw ValidationError("weight vector does not match vertex count");

  const KdTree target_tree(target.points);
  const KdTree vertex_tree(mesh.vertices);

  LossValue out;
  out.gradient = VertexMatrix::Zero(n, 3);

  // mesh -> target, weighted
  std::vector<double> contrib(n);
  std::vector<int> vertex_nn(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const auto hit = target_tree.nearest(mesh.vertices.row(i));
    vertex_nn[i] = hit.index;
    contrib[i] = weights[i] * hit.dist_sq;
  }
  double term1 = 0.0;
  for (int i = 0; i < n; ++i) term1 += contrib[i];
  term1 /= n;
  for (int i = 0; i < n; ++i) {
    const Vec3 diff = mesh.vertices.row(i) - target.points.row(vertex_nn[i]);
    out.gradient.row(i) += (2.0 * weights[i] / n) * diff.transpose();
  }

  // target -> mesh vertices, unweighted
  std::vector<double> contrib_t(nt);
  std::vector<int> sample_nn(nt);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nt; ++j) {
    const auto hit = vertex_tree.nearest(target.points.row(j));
    sample_nn[j] = hit.index;
    contrib_t[j] = hit.dist_sq;
  }
  double term2 = 0.0;
  for (int j = 0; j < nt; ++j) term2 += contrib_t[j];
  term2 /= nt;
  for (int j = 0; j < nt; ++j) {
    const Vec3 diff =
        mesh.vertices.row(sample_nn[j]) - target.points.row(j);
    out.gradient.row(sample_nn[j]) += (2.0 / nt) * diff.transpose();
  }

  out.value = term1 + term2;
  return out;
}

LossValue normal_consistency(const TriangleMesh& mesh,
                             const SurfaceSamples& target,
                             const VectorXd& weights) {
  check_target(target);
  check_unit_normals(target);
  const int m = mesh.face_count();
  if (weights.size() != mesh.vertex_count())
    throw ValidationError("weight vector does not match vertex count");

  const KdTree target_tree(target.points);
  const VertexMatrix normals = face_normals(mesh);

  std::vector<double> contrib(m);
  std::vector<Vec3> grad_n(m);
#pragma omp parallel for schedule(static)
  for (int f = 0; f < m; ++f) {
    const Vec3 centroid = (mesh.vertices.row(mesh.faces(f, 0)) +
                           mesh.vertices.row(mesh.faces(f, 1)) +
                           mesh.vertices.row(mesh.faces(f, 2))) /
                          3.0;
    const auto hit = target_tree.nearest(centroid);
    const Vec3 target_normal = target.normals.row(hit.index);
    const double wbar = (weights[mesh.faces(f, 0)] + weights[mesh.faces(f, 1)] +
                         weights[mesh.faces(f, 2)]) /
                        3.0;
    contrib[f] = wbar * (1.0 - normals.row(f).dot(target_normal));
    grad_n[f] = -(wbar / m) * target_normal;
  }

  LossValue out;
  out.gradient = VertexMatrix::Zero(mesh.vertex_count(), 3);
  double sum = 0.0;
  for (int f = 0; f < m; ++f) sum += contrib[f];
  out.value = sum / m;
  for (int f = 0; f < m; ++f)
    accumulate_face_normal_gradient(mesh, f, grad_n[f], out.gradient);
  return out;
}

LossValue geometric_consistency(const TriangleMesh& mesh,
                                const SurfaceSamples& target,
                                const VectorXd& weights) {
  const LossValue lp = point_consistency(mesh, target, weights);
  const LossValue ln = normal_consistency(mesh, target, weights);
  const double a = lp.value + kGeoEps, b = ln.value + kGeoEps;
  const double root = std::sqrt(a * b);
  LossValue out;
  out.value = root - kGeoEps;
  out.gradient = (b * lp.gradient + a * ln.gradient) / (2.0 * root);
  return out;
}

LossValue coplanar_energy(const TriangleMesh& mesh, const TemplateTags& tags) {
  const VertexMatrix normals = face_normals(mesh);
  LossValue out;
  out.gradient = VertexMatrix::Zero(mesh.vertex_count(), 3);
  for (const auto& cap : tags.caps) {
    if (cap.cap_faces.empty())
      throw ValidationError("cap '" + cap.name + "' has no faces");
    Vec3 mean = Vec3::Zero();
    for (int f : cap.cap_faces) mean += normals.row(f).transpose();
    mean /= static_cast<double>(cap.cap_faces.size());
    for (int f : cap.cap_faces) {
      const Vec3 diff = normals.row(f).transpose() - mean;
      out.value += diff.squaredNorm();
      // the mean's dependence on n_f cancels in the gradient
      accumulate_face_normal_gradient(mesh, f, 2.0 * diff, out.gradient);
    }
  }
  return out;
}

LossValue orthogonal_energy(const TriangleMesh& mesh,
                            const TemplateTags& tags) {
  const VertexMatrix normals = face_normals(mesh);
  LossValue out;
  out.gradient = VertexMatrix::Zero(mesh.vertex_count(), 3);
  for (const auto& cap : tags.caps) {
    if (cap.cap_faces.empty() || cap.wall_faces.empty())
      throw ValidationError("cap '" + cap.name +
                            "' needs nonempty cap and wall face sets");
    Vec3 cap_mean = Vec3::Zero();
    for (int f : cap.cap_faces) cap_mean += normals.row(f).transpose();
    cap_mean /= static_cast<double>(cap.cap_faces.size());

    Vec3 wall_signed_sum = Vec3::Zero();
    for (int f : cap.wall_faces) {
      const double dot = normals.row(f).dot(cap_mean);
      out.value += std::abs(dot);
      out.min_orthogonality_margin =
          std::min(out.min_orthogonality_margin, std::abs(dot));
      const double sign = (dot > 0) - (dot < 0);
      if (sign != 0.0) {
        accumulate_face_normal_gradient(mesh, f, sign * cap_mean,
                                        out.gradient);
        wall_signed_sum += sign * normals.row(f).transpose();
      }
    }
    const Vec3 grad_cap = wall_signed_sum / static_cast<double>(cap.cap_faces.size());
    for (int f : cap.cap_faces)
      accumulate_face_normal_gradient(mesh, f, grad_cap, out.gradient);
  }
  return out;
}

L2Consistency l2_consistency(const VertexMatrix& S, const VertexMatrix& V) {
  if (S.rows() != V.rows())
    throw ValidationError("l2_consistency: shape mismatch");
  L2Consistency out;
  const VertexMatrix diff = S - V;
  out.value = diff.squaredNorm();
  out.gradient_first = 2.0 * diff;
  out.gradient_second = -2.0 * diff;
  return out;
}

VectorXd effective_vertex_weights(
    const TriangleMesh& mesh, const TemplateTags& tags,
    const std::map<std::string, SurfaceSamples>& targets,
    double inlet_weight) {
  VectorXd w = tags.vertex_weights.size() == mesh.vertex_count()
                   ? tags.vertex_weights
                   : VectorXd::Ones(mesh.vertex_count());

  for (const auto& cap : tags.caps) {
    if (!cap.is_inlet()) continue;
    for (int f : cap.wall_faces)
      for (int k = 0; k < 3; ++k) w[mesh.faces(f, k)] *= inlet_weight;
  }

  bool have_box = false;
  Aabb box;
  for (const auto& [name, samples] : targets) {
    if (samples.count() == 0) continue;
    const Aabb b = Aabb::of(samples.points);
    if (!have_box) {
      box = b;
      have_box = true;
    } else {
      box.expand(b.lo);
      box.expand(b.hi);
    }
  }
  if (have_box) {
    const Vec3 center = 0.5 * (box.lo + box.hi);
    const Vec3 half = 0.5 * (box.hi - box.lo) * 1.01;
    box.lo = center - half;
    box.hi = center + half;
    for (int i = 0; i < mesh.vertex_count(); ++i)
      if (!box.contains(mesh.vertices.row(i))) w[i] = 0.0;
  }
  return w;
}

LossValue total_mesh_loss(const TriangleMesh& mesh,
                          const std::map<std::string, SurfaceSamples>& targets,
                          const TemplateTags& tags, const LossWeights& weights,
                          const std::set<std::string>& unsupervised) {
  weights.validate();
  const VectorXd w =
      effective_vertex_weights(mesh, tags, targets, weights.inlet_weight);

  LossValue out;
  out.gradient = VertexMatrix::Zero(mesh.vertex_count(), 3);

  for (const auto& [name, faces] : tags.structures) {
    const auto it = targets.find(name);
    if (it == targets.end()) {
      if (unsupervised.count(name)) continue;
      throw ValidationError("structure '" + name +
                            "' has no target samples and is not marked "
                            "unsupervised");
    }
    const SubMesh sub = extract_submesh(mesh, faces);
    VectorXd sub_w(sub.vertex_map.size());
    for (size_t i = 0; i < sub.vertex_map.size(); ++i)
      sub_w[i] = w[sub.vertex_map[i]];
    const LossValue geo = geometric_consistency(sub.mesh, it->second, sub_w);
    out.value += geo.value;
    for (size_t i = 0; i < sub.vertex_map.size(); ++i)
      out.gradient.row(sub.vertex_map[i]) += geo.gradient.row(i);
  }

  if (!tags.caps.empty() && weights.alpha > 0) {
    const LossValue cop = coplanar_energy(mesh, tags);
    const LossValue orth = orthogonal_energy(mesh, tags);
    out.value += weights.alpha * (cop.value + weights.beta * orth.value);
    out.gradient += weights.alpha * cop.gradient;
    out.gradient += weights.alpha * weights.beta * orth.gradient;
    out.min_orthogonality_margin = orth.min_orthogonality_margin;
  }
  return out;
}

}  // namespace cardiomesh
