#pragma once

// Planar convex bodies: 2D hulls, width/area/perimeter, circumradius and
// inradius, and the Bonnesen-type isoperimetric remainders.

#include <algorithm>
#include <optional>

#include "pulab/core.hpp"

namespace pulab {

struct PlanarConvexBody {
  std::vector<Vec2> boundary;  // CCW, corners only

  int size() const { return static_cast<int>(boundary.size()); }
};

struct ShadowReport {
  double width = 0.0;      // minimal width over directions
  double area = 0.0;       // shoelace area
  double perimeter = 0.0;  // boundary length
};

struct BonnesenReport {
  double isoperimetric_deficit = 0.0;  // L^2 - 4*pi*A
  double remainder_radii = 0.0;        // pi^2 (R - r)^2
  double remainder_area = 0.0;         // A^2 (1/r - 1/R)^2
  double remainder_perimeter = 0.0;    // L^2 ((R - r)/(R + r))^2
  double circumradius = 0.0;
  double inradius = 0.0;
};

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Andrew monotone chain; strictly convex output (collinear points dropped).
inline std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x() == b.x() && a.y() == b.y(); }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw FlatBodyError("convex_hull_2d: fewer than 3 distinct points");

  double scale = 0.0;
  for (const Vec2& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale * scale;

  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= tol) --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= tol) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw FlatBodyError("convex_hull_2d: degenerate hull");
  return hull;
}

inline void validate_polygon(const PlanarConvexBody& b) {
  const int n = b.size();
  if (n < 3) throw InvariantError("polygon: fewer than 3 vertices");
  double scale = 0.0;
  for (const Vec2& p : b.boundary) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale * scale;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = b.boundary[i];
    const Vec2& c = b.boundary[(i + 1) % n];
    const Vec2& d = b.boundary[(i + 2) % n];
    if (cross2(c - a, d - c) < -tol) throw InvariantError("polygon: not convex CCW");
  }
}

inline double polygon_area(const PlanarConvexBody& b) {
  double twice = 0.0;
  const int n = b.size();
  for (int i = 0; i < n; ++i) twice += cross2(b.boundary[i], b.boundary[(i + 1) % n]);
  return 0.5 * twice;
}

inline double polygon_perimeter(const PlanarConvexBody& b) {
  double len = 0.0;
  const int n = b.size();
  for (int i = 0; i < n; ++i) len += (b.boundary[(i + 1) % n] - b.boundary[i]).norm();
  return len;
}

// Minimal width by rotating calipers: for each edge direction, the vertex
// distance from the edge line is unimodal over the cycle, so the antipodal
// pointer only advances (O(n) overall). Exact for polygons.
inline double polygon_width(const PlanarConvexBody& b) {
  const int n = b.size();
  double width = std::numeric_limits<double>::infinity();
  int j = 1;  // absolute counter, indexed mod n
  for (int i = 0; i < n; ++i) {
    const Vec2& a = b.boundary[i];
    const Vec2 e = b.boundary[(i + 1) % n] - a;
    const double len = e.norm();
    if (len <= 0.0) continue;
    auto dist = [&](int k) { return cross2(e, b.boundary[k % n] - a) / len; };
    while (j < i + 2 * n && dist(j + 1) > dist(j)) ++j;
    width = std::min(width, dist(j));
  }
  return width;
}

inline ShadowReport planar_metrics(const PlanarConvexBody& b) {
  validate_polygon(b);
  ShadowReport r;
  r.area = polygon_area(b);
  r.perimeter = polygon_perimeter(b);
  r.width = polygon_width(b);
  if (!(r.width > 0.0) || !(r.area > 0.0)) throw InvariantError("planar_metrics: degenerate body");
  return r;
}

namespace detail {

struct Circle {
  Vec2 c;
  double r2;
};

inline bool in_circle(const Vec2& p, const Circle& c) {
  return (p - c.c).squaredNorm() <= c.r2 * (1.0 + 1e-12) + 1e-30;
}

inline Circle circle_2pt(const Vec2& a, const Vec2& b) {
  const Vec2 c = 0.5 * (a + b);
  return {c, (a - c).squaredNorm()};
}

inline Circle circle_3pt(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a, v = c - a;
  const double d = 2.0 * cross2(u, v);
  if (d == 0.0) {
    // Collinear: the widest 2-point circle covers.
    Circle best = circle_2pt(a, b);
    for (const Circle cand : {circle_2pt(a, c), circle_2pt(b, c)})
      if (cand.r2 > best.r2) best = cand;
    return best;
  }
  const double u2 = u.squaredNorm(), v2 = v.squaredNorm();
  const Vec2 center = a + Vec2(v.y() * u2 - u.y() * v2, u.x() * v2 - v.x() * u2) / d;
  return {center, (a - center).squaredNorm()};
}

// Welzl's move-to-front minimum enclosing circle on a deterministically
// shuffled copy.
inline Circle min_enclosing_circle(std::vector<Vec2> pts) {
  std::mt19937_64 eng(0x9e3779b97f4a7c15ULL);
  for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[eng() % i]);
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (in_circle(pts[i], c)) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (in_circle(pts[j], c)) continue;
      c = circle_2pt(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (in_circle(pts[k], c)) continue;
        c = circle_3pt(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

// Clip a polygon by the half-plane n.dot(x) <= d (Sutherland-Hodgman).
inline std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& n, double d) {
  std::vector<Vec2> out;
  const int m = static_cast<int>(poly.size());
  out.reserve(m + 1);
  for (int i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = n.dot(a) - d, db = n.dot(b) - d;
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) out.push_back(a + (b - a) * (da / (da - db)));
  }
  return out;
}

}  // namespace detail

// Circumradius (minimum enclosing circle) and inradius (largest inscribed
// circle). The inradius is solved by bisection on the erosion radius: the body
// shrunk by r is nonempty iff a circle of radius r fits. The bracket is closed
// to a relative duality gap of 1e-9.
inline std::pair<double, double> planar_radii(const PlanarConvexBody& b) {
  validate_polygon(b);
  const auto mec = detail::min_enclosing_circle(b.boundary);
  const double circumradius = std::sqrt(mec.r2);

  const int n = b.size();
  std::vector<Vec2> normals(n);
  std::vector<double> offsets(n);
  for (int i = 0; i < n; ++i) {
    const Vec2& a = b.boundary[i];
    const Vec2& c = b.boundary[(i + 1) % n];
    const Vec2 e = c - a;
    const Vec2 out(e.y(), -e.x());  // outward for CCW
    const double len = out.norm();
    normals[i] = out / len;
    offsets[i] = normals[i].dot(a);
  }
  auto feasible = [&](double r) {
    std::vector<Vec2> region = b.boundary;
    for (int i = 0; i < n && !region.empty(); ++i)
      region = detail::clip_halfplane(region, normals[i], offsets[i] - r);
    return !region.empty();
  };
  double lo = 0.0, hi = circumradius;
  while (hi - lo > 1e-9 * circumradius) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return {circumradius, 0.5 * (lo + hi)};
}

inline BonnesenReport bonnesen_deficits(const PlanarConvexBody& b) {
  const ShadowReport m = planar_metrics(b);
  const auto [R, r] = planar_radii(b);
  BonnesenReport rep;
  rep.circumradius = R;
  rep.inradius = r;
  rep.isoperimetric_deficit = m.perimeter * m.perimeter - 4.0 * kPi * m.area;
  rep.remainder_radii = kPi * kPi * (R - r) * (R - r);
  rep.remainder_area = m.area * m.area * (1.0 / r - 1.0 / R) * (1.0 / r - 1.0 / R);
  const double q = (R - r) / (R + r);
  rep.remainder_perimeter = m.perimeter * m.perimeter * q * q;
  return rep;
}

}  // namespace pulab
