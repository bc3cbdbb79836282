#pragma once

#include <map>
#include <string>
#include <vector>

#include "cardiomesh/types.hpp"

namespace cardiomesh {

/// Triangle surface mesh. Connectivity is fixed after construction; only
/// vertex positions change under deformation. Face winding is
/// counter-clockwise seen from outside.
struct TriangleMesh {
  VertexMatrix vertices;  // n x 3, mm
  FaceMatrix faces;       // m x 3, indices into vertices

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int face_count() const { return static_cast<int>(faces.rows()); }

  /// Throws ValidationError on out-of-range or repeated face indices.
  void validate() const;

  Aabb bounding_box() const;
};

/// One vessel truncation surface and the wall faces adjacent to it.
struct CapRecord {
  std::string name;
  std::vector<int> cap_faces;
  std::vector<int> wall_faces;

  /// Inlet caps get the higher geometric-consistency weight on their walls.
  bool is_inlet() const;
};

/// Per-structure, cap and weight annotations of a template mesh.
struct TemplateTags {
  std::map<std::string, std::vector<int>> structures;  // name -> face set
  std::vector<CapRecord> caps;
  VectorXd vertex_weights;  // length n, all >= 0, default 1

  void validate(const TriangleMesh& mesh) const;
};

struct TaggedMesh {
  TriangleMesh mesh;
  TemplateTags tags;
};

/// Oriented point samples of a target surface.
struct SurfaceSamples {
  VertexMatrix points;        // mm
  VertexMatrix normals;       // unit
  std::vector<int> source_face;

  int count() const { return static_cast<int>(points.rows()); }
};

/// Unit face normals in winding order. Throws ValidationError when a face's
/// edge cross product has norm below 1e-12 (degenerate face).
VertexMatrix face_normals(const TriangleMesh& mesh);

/// Twice-area cross products, unnormalized. No degeneracy check.
VertexMatrix face_normals_raw(const TriangleMesh& mesh);

VectorXd face_areas(const TriangleMesh& mesh);

/// Area-weighted unit vertex normals (sum of incident raw face normals).
VertexMatrix vertex_normals(const TriangleMesh& mesh);

struct VolumeResult {
  double volume = 0.0;  // absolute value, mm^3
  int sign = 0;         // sign of the raw divergence-theorem sum
};

/// Enclosed volume by the divergence theorem. Requires a closed, consistently
/// oriented mesh: every undirected edge shared by exactly two faces, once in
/// each direction. Throws ValidationError listing boundary edges otherwise.
VolumeResult enclosed_volume(const TriangleMesh& mesh);

/// Lists edges violating the closed-oriented condition; empty means closed.
std::vector<std::pair<int, int>> boundary_edges(const TriangleMesh& mesh);

/// Area-weighted uniform surface sampling, deterministic for a fixed seed
/// and independent of thread count.
SurfaceSamples surface_samples(const TriangleMesh& mesh, int count,
                               std::uint64_t seed);

/// Sub-mesh over a face subset. vertex_map[i] is the original index of
/// sub-vertex i.
struct SubMesh {
  TriangleMesh mesh;
  std::vector<int> vertex_map;
};

SubMesh extract_submesh(const TriangleMesh& mesh,
                        const std::vector<int>& face_indices);

}  // namespace cardiomesh
