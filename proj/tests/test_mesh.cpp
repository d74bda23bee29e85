#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pulab/families.hpp"
#include "pulab/mesh.hpp"
#include "testutil.hpp"

using namespace pulab;

TEST_CASE("octahedron hull has the forced combinatorics") {
  const auto m = make_octahedron();
  REQUIRE(m.num_vertices() == 6);
  REQUIRE(m.num_triangles() == 8);
  REQUIRE_NOTHROW(validate_mesh(m));
  const int euler = m.num_vertices() - static_cast<int>(mesh_edges(m).size()) + m.num_triangles();
  REQUIRE(euler == 2);
}

TEST_CASE("cube hull merges coplanar faces into a symmetric triangulation") {
  const auto m = make_cube();
  REQUIRE(m.num_vertices() == 8);
  REQUIRE(m.num_triangles() == 12);
  REQUIRE_NOTHROW(validate_mesh(m));
  // Triangle set closed under the antipodal map.
  std::set<std::array<int, 3>> keys;
  for (const auto& t : m.triangles) {
    std::array<int, 3> k = t;
    std::sort(k.begin(), k.end());
    keys.insert(k);
  }
  for (const auto& t : m.triangles) {
    std::array<int, 3> k = {m.antipode[t[0]], m.antipode[t[1]], m.antipode[t[2]]};
    std::sort(k.begin(), k.end());
    REQUIRE(keys.count(k) == 1);
  }
}

TEST_CASE("icosphere point hull keeps all cospherical points") {
  const auto ico = make_icosphere(3);
  REQUIRE(ico.num_vertices() == 642);
  const auto m = build_symmetric_hull(ico.vertices);
  REQUIRE(m.num_vertices() == 642);
  for (const Vec3& v : m.vertices) REQUIRE(v.norm() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE_NOTHROW(validate_mesh(m));
}

TEST_CASE("random ball cloud: retained vertices pass the half-space oracle") {
  Rng rng(7);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(std::cbrt(rng.uniform()) * 2.0 * rng.unit_direction());
  const auto m = build_symmetric_hull(pts);
  REQUIRE(m.num_vertices() < 1000);
  REQUIRE_NOTHROW(validate_mesh(m));

  // Oracle: every retained vertex is outside (on the boundary of) the hull of
  // the others: it cannot be written as lying strictly inside all face planes
  // spanned by the rest. Equivalently here: dropping it shrinks the hull.
  const double tol = 1e-9 * m.bbox_diagonal();
  for (int probe = 0; probe < m.num_vertices(); probe += 37) {
    std::vector<Vec3> rest;
    for (int i = 0; i < m.num_vertices(); ++i)
      if (i != probe && i != m.antipode[probe]) rest.push_back(m.vertices[i]);
    const auto inner = build_symmetric_hull(rest);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& t : inner.triangles) {
      const Vec3& a = inner.vertices[t[0]];
      const Vec3 n = (inner.vertices[t[1]] - a).cross(inner.vertices[t[2]] - a).normalized();
      worst = std::max(worst, n.dot(m.vertices[probe] - a));
    }
    REQUIRE(worst > -tol);  // strictly outside the reduced hull (extreme point)
  }
}

TEST_CASE("hull is idempotent on its own vertex set") {
  const auto m = make_random_symmetric_polytope(64, 42);
  const auto again = build_symmetric_hull(m.vertices);
  REQUIRE(again.num_vertices() == m.num_vertices());
  std::set<std::array<double, 3>> a, b;
  for (const Vec3& v : m.vertices) a.insert({v.x(), v.y(), v.z()});
  for (const Vec3& v : again.vertices) b.insert({v.x(), v.y(), v.z()});
  REQUIRE(a == b);
}

TEST_CASE("antipode involution is exact after symmetrization") {
  const auto m = make_random_symmetric_polytope(48, 11);
  for (int i = 0; i < m.num_vertices(); ++i) {
    REQUIRE(m.antipode[m.antipode[i]] == i);
    REQUIRE(m.vertices[m.antipode[i]] == -m.vertices[i]);
  }
}

TEST_CASE("flat input raises the dedicated error") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 20; ++i) pts.emplace_back(std::cos(i), std::sin(i), 0.0);
  REQUIRE_THROWS_AS(build_symmetric_hull(pts), FlatBodyError);
}

TEST_CASE("mesh area closed forms and convergence") {
  REQUIRE(mesh_area(make_octahedron()) == Catch::Approx(4.0 * std::sqrt(3.0)).epsilon(1e-12));

  // Inscribed polyhedra: area increases under refinement, bounded by 4*pi.
  double prev = 0.0;
  for (int level = 1; level <= 4; ++level) {
    const double a = mesh_area(make_icosphere(level));
    REQUIRE(a > prev);
    REQUIRE(a < 4.0 * kPi);
    prev = a;
  }
  const double h = make_icosphere(4).max_edge_length();
  REQUIRE(4.0 * kPi - prev < 4.0 * h * h);  // O(h^2) gap
}

TEST_CASE("ellipsoid area matches the quadrature oracle") {
  const double oracle = testutil::ellipsoid_area_quadrature(1.0, 1.0, 2.0);
  const double computed = mesh_area(make_ellipsoid(1.0, 1.0, 2.0, 6));
  REQUIRE(std::abs(computed - oracle) / oracle < 5e-3);
}

TEST_CASE("refine: identity at level 0 and 1-to-4 counting") {
  const auto octa = make_octahedron();
  const auto same = refine(octa, 0);
  REQUIRE(same.num_vertices() == 6);
  REQUIRE(same.num_triangles() == 8);

  const auto one = refine(octa, 1);
  REQUIRE(one.num_vertices() == 18);
  REQUIRE(one.num_triangles() == 32);
  REQUIRE_NOTHROW(validate_mesh(one));
}

TEST_CASE("refine halves the maximum edge length on the sphere") {
  const auto a = make_icosphere(3);
  const auto b = refine_once(a);
  const double ratio = b.max_edge_length() / a.max_edge_length();
  REQUIRE(ratio > 0.4);
  REQUIRE(ratio < 0.6);
  REQUIRE_NOTHROW(validate_mesh(b));
}

TEST_CASE("shadows: sphere, octahedron and ellipsoid") {
  const auto sphere = make_octasphere(4);
  const auto disk = project_shadow(sphere, Vec3(0.3, -0.2, 0.9));
  double max_norm = 0.0, min_support = std::numeric_limits<double>::infinity();
  const int n = disk.size();
  for (int i = 0; i < n; ++i) {
    max_norm = std::max(max_norm, disk.boundary[i].norm());
    const Vec2 e = disk.boundary[(i + 1) % n] - disk.boundary[i];
    const Vec2 out = Vec2(e.y(), -e.x()).normalized();
    min_support = std::min(min_support, out.dot(disk.boundary[i]));
  }
  REQUIRE(max_norm <= 1.0 + 1e-12);
  REQUIRE(min_support >= 1.0 - 5e-3);

  const auto square = project_shadow(make_octahedron(), Vec3(0, 0, 1));
  REQUIRE(square.size() == 4);
  for (const Vec2& p : square.boundary) REQUIRE(p.cwiseAbs().maxCoeff() == Catch::Approx(1.0).margin(1e-12));

  // Shadow of the (1,2,3) ellipsoid along the short axis: support function of
  // the ellipse with semi-axes (2,3) as the analytic oracle.
  const auto body = make_ellipsoid(1, 2, 3, 5);
  const auto shadow = project_shadow(body, Vec3(1, 0, 0));
  for (int k = 0; k < 64; ++k) {
    const double t = 2.0 * kPi * k / 64;
    const Vec2 dir(std::cos(t), std::sin(t));
    double support = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : shadow.boundary) support = std::max(support, dir.dot(p));
    // plane_basis(e_x) spans (y, z) up to sign/order; the ellipse support is
    // sqrt((2 u)^2 + (3 v)^2) for any orthonormal frame of that plane.
    double expected = 0.0;
    {
      Vec3 u, v;
      plane_basis(Vec3(1, 0, 0), u, v);
      const Vec3 w = dir.x() * u + dir.y() * v;
      expected = std::sqrt(std::pow(2.0 * w.y(), 2) + std::pow(3.0 * w.z(), 2));
    }
    REQUIRE(support == Catch::Approx(expected).epsilon(5e-3));
  }
}
