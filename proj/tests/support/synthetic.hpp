#pragma once

#include <cardiomesh/mesh.hpp>

namespace cardiomesh::synthetic {

/// Unit cube [0,1]^3, 8 vertices, 12 faces, outward orientation.
TriangleMesh unit_cube();

/// Subdivided icosahedron projected to the given radius.
/// Vertex counts by level: 12, 42, 162, 642, 2562, 10242.
TriangleMesh icosphere(int subdivisions, double radius = 1.0);

/// Icosphere scaled per axis.
TriangleMesh ellipsoid(int subdivisions, const Vec3& semi_axes);

/// Single CCW triangle in the z=0 plane.
TriangleMesh single_triangle();

/// Two triangles forming the unit square in z=0, CCW from +z.
TriangleMesh unit_square();

/// 4-vertex strip of two triangles (used for tiny hand oracles).
TriangleMesh two_triangle_strip();

/// Rectangular strip of 2*segments triangles with seeded random crumpling;
/// routinely self-intersects.
TriangleMesh crumpled_strip(int segments, std::uint64_t seed,
                            double amplitude = 0.8);

/// Closed sphere body with `vessels` conical tubes (up to 4), each ending in
/// a planar cap. Tags carry one structure "all", per-vessel caps named
/// inlet_0, outlet_1, ... with the tube ring adjacent to each cap as its
/// wall.
TaggedMesh vessel_template(int vessels = 4);

/// Midpoint 1-to-4 subdivision; new vertices sit exactly on source edges.
TriangleMesh subdivide_midpoint(const TriangleMesh& mesh);

/// Smooth bump displacement: p + amplitude * exp(-|p-center|^2/sigma^2) * dir.
VertexMatrix bump_displace(const VertexMatrix& vertices, const Vec3& center,
                           double sigma, const Vec3& dir, double amplitude);

}  // namespace cardiomesh::synthetic
