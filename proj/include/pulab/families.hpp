#pragma once

// Generators for the analytic and random body families. Analytic bodies are
// built from the octahedron by midpoint refinement with an odd projector onto
// the support surface; the equator is an exact vertex ring, which keeps the
// waist systole well resolved even for strongly stretched bodies.

#include "pulab/core.hpp"
#include "pulab/mesh.hpp"

namespace pulab {

inline SymmetricConvexMesh make_octahedron() {
  return build_symmetric_hull({Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)});
}

inline SymmetricConvexMesh make_cube() {
  return build_symmetric_hull({Vec3(1, 1, 1), Vec3(1, 1, -1), Vec3(1, -1, 1), Vec3(-1, 1, 1)});
}

inline SymmetricConvexMesh make_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts;
  for (const double s : {1.0, -1.0}) {
    pts.emplace_back(0, s, phi);
    pts.emplace_back(s, phi, 0);
    pts.emplace_back(phi, 0, s);
  }
  for (Vec3& p : pts) p /= p.norm();
  return build_symmetric_hull(pts);
}

inline Projector sphere_projector() {
  return [](const Vec3& p) { return Vec3(p / p.norm()); };
}

// Unit sphere mesh with an exact equatorial vertex ring.
inline SymmetricConvexMesh make_octasphere(int level) {
  SymmetricConvexMesh m = make_octahedron();
  m.support = sphere_projector();
  return refine(m, level);
}

inline SymmetricConvexMesh make_icosphere(int level) {
  SymmetricConvexMesh m = make_icosahedron();
  m.support = sphere_projector();
  return refine(m, level);
}

// Ellipsoid with semi-axes (a, b, c); image of the octasphere under the axis
// scaling, so vertices lie exactly on the surface.
inline SymmetricConvexMesh make_ellipsoid(double a, double b, double c, int level) {
  if (!(a > 0) || !(b > 0) || !(c > 0)) throw InvariantError("ellipsoid: axes must be positive");
  const Vec3 s(a, b, c);
  Projector proj = [s](const Vec3& p) {
    Vec3 u = p.cwiseQuotient(s);
    u /= u.norm();
    return Vec3(u.cwiseProduct(s));
  };
  SymmetricConvexMesh m = make_octahedron();
  for (Vec3& v : m.vertices) v = v.cwiseProduct(s);
  m.support = proj;
  return refine(m, level);
}

// Unit-radius cylinder of half-height h with unit hemispherical caps
// (circumradius h + 1). h = 0 degenerates to the unit sphere.
inline Projector capped_cylinder_projector(double h) {
  return [h](const Vec3& p) {
    const Vec3 u = p / p.norm();
    const double rho = std::hypot(u.x(), u.y());
    const double az = std::abs(u.z());
    double scale;
    if (az <= h * rho) {
      scale = 1.0 / rho;  // ray hits the cylindrical side
    } else {
      // Unit u: solve |s u - (0, 0, +-h)| = 1 for the cap sphere.
      scale = h * az + std::sqrt(std::max(0.0, h * h * az * az - h * h + 1.0));
    }
    return Vec3(scale * u);
  };
}

inline SymmetricConvexMesh make_capped_cylinder(double h, int level) {
  if (!(h >= 0)) throw InvariantError("capped_cylinder: height must be nonnegative");
  Projector proj = capped_cylinder_projector(h);
  SymmetricConvexMesh m = make_octahedron();
  for (Vec3& v : m.vertices) v = proj(v);
  m.support = proj;
  return refine(m, level);
}

// Hull of `npoints` random directions with radii in [0.5, 1.5], symmetrized.
inline SymmetricConvexMesh make_random_symmetric_polytope(int npoints, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> pts;
  pts.reserve(npoints);
  for (int i = 0; i < npoints; ++i) {
    const Vec3 dir = rng.unit_direction();
    pts.push_back(rng.uniform(0.5, 1.5) * dir);
  }
  return build_symmetric_hull(pts);
}

}  // namespace pulab
