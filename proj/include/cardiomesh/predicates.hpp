#pragma once

#include "cardiomesh/types.hpp"

namespace cardiomesh {

/// Sign of det[b-a; c-a; d-a]: +1 when d sees (a,b,c) counter-clockwise.
/// Evaluated in doubles when the magnitude clears a 1e-10 relative margin,
/// otherwise recomputed in exact rational arithmetic.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// 2D orientation sign with the same filtered-exact strategy.
int orient2d(double ax, double ay, double bx, double by, double cx, double cy);

/// Triangle-triangle intersection including touching contacts; exact for
/// degenerate configurations via the predicates above.
bool tri_tri_intersect(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                       const Vec3& q0, const Vec3& q1, const Vec3& q2);

struct ClosestPoint {
  Vec3 point{0, 0, 0};
  Vec3 barycentric{0, 0, 0};
};

/// Closest point on triangle (a,b,c) to q.
ClosestPoint closest_point_on_triangle(const Vec3& q, const Vec3& a,
                                       const Vec3& b, const Vec3& c);

}  // namespace cardiomesh
