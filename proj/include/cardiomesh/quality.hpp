#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cardiomesh/mesh.hpp"

namespace cardiomesh {

/// Faces participating in at least one intersection with a non-adjacent
/// face (sharing no vertex index). Exact predicates, BVH-accelerated.
std::vector<char> self_intersecting_faces(const TriangleMesh& mesh);

double self_intersection_fraction(const TriangleMesh& mesh);

enum class CwoVariant {
  mean_normals,     // 1 - <unit mean wall normal, unit mean cap normal>
  centroid_vector,  // 1 - <unit mean cap normal, unit(cap centroid - wall centroid)>
};

/// Per-cap cap-wall orthogonality over the vertex sets of the tagged faces,
/// with area-weighted vertex normals. Both means are normalized before the
/// inner product; a zero-length mean raises ValidationError.
std::vector<double> cap_wall_orthogonality(
    const TriangleMesh& mesh, const TemplateTags& tags,
    CwoVariant variant = CwoVariant::mean_normals);

/// Per-cap mean absolute distance (mm) of cap vertices to their best-fit
/// plane (principal-axis fit). Collinear caps raise ValidationError.
std::vector<double> cap_coplanarity(const TriangleMesh& mesh,
                                    const TemplateTags& tags);

struct ChamferHausdorff {
  double chamfer = 0.0;    // mm, mean of the two directed mean distances
  double hausdorff = 0.0;  // mm, max of the two directed max distances
};

ChamferHausdorff chamfer_hausdorff_points(const VertexMatrix& a,
                                          const VertexMatrix& b);

/// Symmetric chamfer and Hausdorff distances between two surfaces via
/// area-weighted samples (same seed on both meshes).
ChamferHausdorff chamfer_and_hausdorff(const TriangleMesh& a,
                                       const TriangleMesh& b, int samples,
                                       std::uint64_t seed);

/// Generalized winding number of the mesh at a point (1 inside a closed
/// counter-clockwise surface, 0 outside).
double winding_number(const TriangleMesh& mesh, const Vec3& point);

struct VoxelGrid {
  Vec3 origin{0, 0, 0};  // centers at origin + (ijk + 0.5) * spacing
  double spacing = 1.0;
  int nx = 0, ny = 0, nz = 0;

  long total() const { return static_cast<long>(nx) * ny * nz; }
  Vec3 center(int ix, int iy, int iz) const {
    return origin + Vec3((ix + 0.5) * spacing, (iy + 0.5) * spacing,
                         (iz + 0.5) * spacing);
  }
  static VoxelGrid shared(const TriangleMesh& a, const TriangleMesh& b,
                          double spacing);
};

/// Occupancy by |winding| >= 0.5 on the grid, parallel over voxels.
std::vector<char> voxelize(const TriangleMesh& mesh, const VoxelGrid& grid);

/// Volumetric Dice on the shared bounding grid at `spacing`. Both meshes
/// must be closed and consistently oriented.
double dice(const TriangleMesh& a, const TriangleMesh& b, double spacing);

struct QualityReport {
  std::vector<std::string> cap_names;
  std::vector<double> cap_cwo;
  std::vector<double> cap_coplanarity_mm;
  double self_intersection_fraction = 0.0;
  double chamfer_mm = 0.0;
  double hausdorff_mm = 0.0;
  std::optional<double> dice;
  std::optional<double> volume_mm3;
};

/// JSON with numbers at 9 significant digits.
std::string quality_report_json(const QualityReport& report);

}  // namespace cardiomesh
