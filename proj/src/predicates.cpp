#include "cardiomesh/predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace cardiomesh {

namespace {

using Rational = boost::multiprecision::cpp_rational;

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c,
                   const Vec3& d) {
  // doubles convert to rationals exactly, so the determinant sign is exact
  const Rational adx = Rational(a.x()) - Rational(d.x());
  const Rational ady = Rational(a.y()) - Rational(d.y());
  const Rational adz = Rational(a.z()) - Rational(d.z());
  const Rational bdx = Rational(b.x()) - Rational(d.x());
  const Rational bdy = Rational(b.y()) - Rational(d.y());
  const Rational bdz = Rational(b.z()) - Rational(d.z());
  const Rational cdx = Rational(c.x()) - Rational(d.x());
  const Rational cdy = Rational(c.y()) - Rational(d.y());
  const Rational cdz = Rational(c.z()) - Rational(d.z());
  const Rational det = adx * (bdy * cdz - bdz * cdy) -
                       ady * (bdx * cdz - bdz * cdx) +
                       adz * (bdx * cdy - bdy * cdx);
  return det.sign();
}

int orient2d_exact(double ax, double ay, double bx, double by, double cx,
                   double cy) {
  const Rational det = (Rational(ax) - Rational(cx)) * (Rational(by) - Rational(cy)) -
                       (Rational(ay) - Rational(cy)) * (Rational(bx) - Rational(cx));
  return det.sign();
}

}  // namespace

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y(), adz = a.z() - d.z();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y(), bdz = b.z() - d.z();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y(), cdz = c.z() - d.z();
  const double t1 = bdy * cdz - bdz * cdy;
  const double t2 = bdx * cdz - bdz * cdx;
  const double t3 = bdx * cdy - bdy * cdx;
  const double det = adx * t1 - ady * t2 + adz * t3;
  const double permanent = std::abs(adx) * (std::abs(bdy * cdz) + std::abs(bdz * cdy)) +
                           std::abs(ady) * (std::abs(bdx * cdz) + std::abs(bdz * cdx)) +
                           std::abs(adz) * (std::abs(bdx * cdy) + std::abs(bdy * cdx));
  if (std::abs(det) > 1e-10 * permanent) return det > 0 ? 1 : -1;
  return orient3d_exact(a, b, c, d);
}

int orient2d(double ax, double ay, double bx, double by, double cx,
             double cy) {
  const double l = (ax - cx) * (by - cy);
  const double r = (ay - cy) * (bx - cx);
  const double det = l - r;
  const double permanent = std::abs(l) + std::abs(r);
  if (std::abs(det) > 1e-10 * permanent) return det > 0 ? 1 : -1;
  return orient2d_exact(ax, ay, bx, by, cx, cy);
}

namespace {

// 2D helpers on a fixed projection axis. proj drops the coordinate where the
// triangle normal is largest.
struct P2 {
  double x, y;
};

P2 project(const Vec3& p, int drop) {
  switch (drop) {
    case 0: return {p.y(), p.z()};
    case 1: return {p.z(), p.x()};
    default: return {p.x(), p.y()};
  }
}

int orient2d(const P2& a, const P2& b, const P2& c) {
  return cardiomesh::orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
}

bool point_in_tri_2d(const P2& p, const P2& a, const P2& b, const P2& c) {
  const int s1 = orient2d(a, b, p);
  const int s2 = orient2d(b, c, p);
  const int s3 = orient2d(c, a, p);
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

bool seg_seg_2d(const P2& a, const P2& b, const P2& c, const P2& d) {
  const int d1 = orient2d(c, d, a);
  const int d2 = orient2d(c, d, b);
  const int d3 = orient2d(a, b, c);
  const int d4 = orient2d(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const P2& p, const P2& q, const P2& r) {
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
           std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
  };
  if (d1 == 0 && on_segment(c, a, d)) return true;
  if (d2 == 0 && on_segment(c, b, d)) return true;
  if (d3 == 0 && on_segment(a, c, b)) return true;
  if (d4 == 0 && on_segment(a, d, b)) return true;
  return false;
}

bool coplanar_seg_tri(const Vec3& a, const Vec3& b, const Vec3& t0,
                      const Vec3& t1, const Vec3& t2, int drop) {
  const P2 pa = project(a, drop), pb = project(b, drop);
  const P2 q0 = project(t0, drop), q1 = project(t1, drop), q2 = project(t2, drop);
  if (point_in_tri_2d(pa, q0, q1, q2) || point_in_tri_2d(pb, q0, q1, q2))
    return true;
  return seg_seg_2d(pa, pb, q0, q1) || seg_seg_2d(pa, pb, q1, q2) ||
         seg_seg_2d(pa, pb, q2, q0);
}

int dominant_axis(const Vec3& t0, const Vec3& t1, const Vec3& t2) {
  const Vec3 n = (t1 - t0).cross(t2 - t0).cwiseAbs();
  int axis = 0;
  if (n.y() > n.x()) axis = 1;
  if (n.z() > n[axis]) axis = 2;
  return axis;
}

// Segment [a,b] against triangle (t0,t1,t2); boundary contacts count.
bool seg_tri_intersect(const Vec3& a, const Vec3& b, const Vec3& t0,
                       const Vec3& t1, const Vec3& t2) {
  const int sa = orient3d(t0, t1, t2, a);
  const int sb = orient3d(t0, t1, t2, b);
  if (sa > 0 && sb > 0) return false;
  if (sa < 0 && sb < 0) return false;
  if (sa == 0 && sb == 0)
    return coplanar_seg_tri(a, b, t0, t1, t2, dominant_axis(t0, t1, t2));
  // the segment crosses or touches the plane: it hits the triangle iff the
  // line a->b passes through it
  const int s1 = orient3d(a, b, t0, t1);
  const int s2 = orient3d(a, b, t1, t2);
  const int s3 = orient3d(a, b, t2, t0);
  return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

}  // namespace

bool tri_tri_intersect(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                       const Vec3& q0, const Vec3& q1, const Vec3& q2) {
  // quick rejection: all of one triangle strictly on one side of the other
  const int dp0 = orient3d(q0, q1, q2, p0);
  const int dp1 = orient3d(q0, q1, q2, p1);
  const int dp2 = orient3d(q0, q1, q2, p2);
  if ((dp0 > 0 && dp1 > 0 && dp2 > 0) || (dp0 < 0 && dp1 < 0 && dp2 < 0))
    return false;
  const int dq0 = orient3d(p0, p1, p2, q0);
  const int dq1 = orient3d(p0, p1, p2, q1);
  const int dq2 = orient3d(p0, p1, p2, q2);
  if ((dq0 > 0 && dq1 > 0 && dq2 > 0) || (dq0 < 0 && dq1 < 0 && dq2 < 0))
    return false;

  if (seg_tri_intersect(p0, p1, q0, q1, q2)) return true;
  if (seg_tri_intersect(p1, p2, q0, q1, q2)) return true;
  if (seg_tri_intersect(p2, p0, q0, q1, q2)) return true;
  if (seg_tri_intersect(q0, q1, p0, p1, p2)) return true;
  if (seg_tri_intersect(q1, q2, p0, p1, p2)) return true;
  if (seg_tri_intersect(q2, q0, p0, p1, p2)) return true;

  // coplanar containment without any edge crossing
  if (dp0 == 0 && dp1 == 0 && dp2 == 0) {
    const int drop = dominant_axis(q0, q1, q2);
    if (point_in_tri_2d(project(p0, drop), project(q0, drop),
                        project(q1, drop), project(q2, drop)))
      return true;
    if (point_in_tri_2d(project(q0, drop), project(p0, drop),
                        project(p1, drop), project(p2, drop)))
      return true;
  }
  return false;
}

ClosestPoint closest_point_on_triangle(const Vec3& q, const Vec3& a,
                                       const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5
  const Vec3 ab = b - a, ac = c - a, aq = q - a;
  const double d1 = ab.dot(aq), d2 = ac.dot(aq);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, {1, 0, 0}};

  const Vec3 bq = q - b;
  const double d3 = ab.dot(bq), d4 = ac.dot(bq);
  if (d3 >= 0.0 && d4 <= d3) return {b, {0, 1, 0}};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {a + v * ab, {1.0 - v, v, 0}};
  }

  const Vec3 cq = q - c;
  const double d5 = ab.dot(cq), d6 = ac.dot(cq);
  if (d6 >= 0.0 && d5 <= d6) return {c, {0, 0, 1}};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {a + w * ac, {1.0 - w, 0, w}};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), {0, 1.0 - w, w}};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {a + ab * v + ac * w, {1.0 - v - w, v, w}};
}

}  // namespace cardiomesh
