#pragma once

// Quadrature grid on the round sphere: antipodally exact icosphere nodes with
// barycentric spherical-area weights. Icosahedral symmetry makes the rule
// exact (to roundoff) for all spherical harmonics of degree 1..5; the first
// invariant harmonic enters at degree 6.

#include "pulab/families.hpp"
#include "pulab/mesh.hpp"

namespace pulab {

struct SphericalGrid {
  SymmetricConvexMesh mesh;      // icosphere, vertices on the unit sphere
  std::vector<double> weights;   // per node, summing to 4 pi
  int level = 0;
  int quadrature_degree = 5;     // exactness degree, validated in tests

  int num_nodes() const { return mesh.num_vertices(); }
  const Vec3& node(int i) const { return mesh.vertices[i]; }
};

// Spherical excess of a unit-vector triangle (Oosterom-Strackee).
inline double spherical_triangle_excess(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = a.dot(b.cross(c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

inline SphericalGrid make_spherical_grid(int level) {
  SphericalGrid grid;
  grid.level = level;
  grid.mesh = make_icosphere(level);
  grid.weights.assign(grid.mesh.num_vertices(), 0.0);
  for (const auto& t : grid.mesh.triangles) {
    const double excess = spherical_triangle_excess(grid.mesh.vertices[t[0]],
                                                    grid.mesh.vertices[t[1]],
                                                    grid.mesh.vertices[t[2]]);
    if (!(excess > 0.0)) throw InvariantError("spherical grid: non-positive triangle excess");
    for (int k = 0; k < 3; ++k) grid.weights[t[k]] += excess / 3.0;
  }
  double sum = 0.0;
  for (const double w : grid.weights) sum += w;
  if (std::abs(sum - 4.0 * kPi) > 1e-10)
    throw InvariantError("spherical grid: weights do not sum to 4 pi");
  return grid;
}

// Quadrature of an integrand over the round sphere.
inline double grid_integral(const SphericalGrid& grid, const std::function<double(const Vec3&)>& f) {
  double s = 0.0;
  for (int i = 0; i < grid.num_nodes(); ++i) s += grid.weights[i] * f(grid.node(i));
  return s;
}

}  // namespace pulab
