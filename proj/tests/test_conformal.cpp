#include <catch2/catch_amalgamated.hpp>

#include "pulab/conformal.hpp"

using namespace pulab;

namespace {

// Independent 1-D quadrature oracle for zonal integrands: integral over S^2
// of g(z) equals 2 pi * integral_{-1}^{1} g(z) dz (dense Simpson).
double zonal_integral(const std::function<double(double)>& g, int n = 4096) {
  double s = g(-1.0) + g(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(-1.0 + 2.0 * i / n);
  return 2.0 * kPi * s * (2.0 / n) / 3.0;
}

double y20_of_z(double z) { return std::sqrt(5.0 / (16.0 * kPi)) * (3.0 * z * z - 1.0); }

}  // namespace

TEST_CASE("grid: weights sum to 4 pi and integrate harmonics of degree <= 5 exactly") {
  const auto grid = make_spherical_grid(4);
  double sum = 0.0;
  for (const double w : grid.weights) sum += w;
  REQUIRE(std::abs(sum - 4.0 * kPi) < 1e-10);

  for (int l = 1; l <= grid.quadrature_degree; ++l)
    for (int m = -l; m <= l; ++m) {
      const double integral =
          grid_integral(grid, [&](const Vec3& x) { return real_sph_harmonic(l, m, x); });
      REQUIRE(std::abs(integral) < 1e-9);
    }

  // Degree 6 carries the first icosahedral invariant: the rule must not be
  // exact there, otherwise the declared degree is undersold.
  double l6 = 0.0;
  for (int m = -6; m <= 6; ++m) {
    const double integral =
        grid_integral(grid, [&](const Vec3& x) { return real_sph_harmonic(6, m, x); });
    l6 += integral * integral;
  }
  REQUIRE(l6 > 1e-12);
}

TEST_CASE("antipodal exactness of the grid") {
  const auto grid = make_spherical_grid(3);
  for (int i = 0; i < grid.num_nodes(); ++i) {
    const int j = grid.mesh.antipode[i];
    REQUIRE(grid.node(j) == -grid.node(i));
    REQUIRE(grid.weights[i] == Catch::Approx(grid.weights[j]).epsilon(1e-12));
  }
}

TEST_CASE("conformal area: constants and a harmonic perturbation") {
  const auto grid = make_spherical_grid(4);
  REQUIRE(conformal_area(conformal_constant(1.0), grid) == Catch::Approx(4.0 * kPi).epsilon(1e-12));
  REQUIRE(conformal_area(conformal_constant(2.0), grid) == Catch::Approx(16.0 * kPi).epsilon(1e-12));

  const double eps = 0.005;
  const auto metric = conformal_from_harmonics({{2, 0, eps}});
  const double oracle = zonal_integral([&](double z) { return std::exp(2.0 * eps * y20_of_z(z)); });
  REQUIRE(std::abs(conformal_area(metric, grid) - oracle) < 1e-8 * oracle);
}

TEST_CASE("conformal systole: round value, homothety, self-convergence") {
  const auto round = conformal_systole(conformal_constant(1.0), 4);
  REQUIRE(std::abs(round.sys - kPi) / kPi < 0.02);
  REQUIRE(round.sys <= kPi + 1e-9);  // inscribed chords shorten the equator

  const auto scaled = conformal_systole(conformal_constant(2.5), 4);
  REQUIRE(scaled.sys == Catch::Approx(2.5 * round.sys).epsilon(1e-12));

  const auto metric = conformal_from_harmonics({{2, 0, 0.3}});
  const auto coarse = conformal_systole(metric, 4);
  const auto fine = conformal_systole(metric, 5);
  REQUIRE(std::abs(fine.sys - coarse.sys) / fine.sys < 0.01);
}

TEST_CASE("odd metrics are rejected") {
  REQUIRE_THROWS_AS(conformal_from_harmonics({{1, 0, 0.3}}), EvennessError);
  REQUIRE_THROWS_AS(conformal_from_harmonics({{3, 2, 0.1}}), EvennessError);

  // Odd atomic measure: potential flips sign under the antipodal map.
  RadonMassSpec odd;
  odd.atoms = {{Vec3(0, 0, 1), 0.5}, {Vec3(0, 0, -1), -0.5}};
  const auto metric = conformal_from_atoms(odd);
  const auto grid = make_spherical_grid(3);
  REQUIRE_THROWS_AS(conformal_node_values(metric, grid), EvennessError);
}

TEST_CASE("great-circle identity: nu(Gamma), odd harmonic, z^2") {
  const auto grid = make_spherical_grid(4);
  const GreatCircleSpace gs{&grid, 256};

  const auto [lhs1, rhs1] = santalo_sides([](const Vec3&) { return 1.0; }, gs);
  REQUIRE(std::abs(lhs1 - 4.0 * kPi) < 1e-9);
  REQUIRE(std::abs(rhs1 - 4.0 * kPi) < 1e-9);

  const auto [lhs2, rhs2] =
      santalo_sides([](const Vec3& x) { return real_sph_harmonic(1, 0, x); }, gs);
  REQUIRE(std::abs(lhs2) < 1e-9);
  REQUIRE(std::abs(rhs2) < 1e-9);

  const auto [lhs3, rhs3] = santalo_sides([](const Vec3& x) { return x.z() * x.z(); }, gs);
  REQUIRE(lhs3 == Catch::Approx(4.0 * kPi / 3.0).epsilon(1e-9));
  REQUIRE(std::abs(lhs3 - rhs3) < 1e-6 * std::abs(lhs3));
}

TEST_CASE("great-circle identity on random polynomials up to the exactness degree") {
  const auto grid = make_spherical_grid(4);
  const GreatCircleSpace gs{&grid, 256};
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::array<int, 3>> monos;
    std::vector<double> coef;
    for (int px = 0; px <= 3; ++px)
      for (int py = 0; py <= 2; ++py)
        for (int pz = 0; pz <= 2; ++pz) {
          if (px + py + pz > 5) continue;
          monos.push_back({px, py, pz});
          coef.push_back(rng.uniform(-1.0, 1.0));
        }
    auto F = [&](const Vec3& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < monos.size(); ++i)
        s += coef[i] * std::pow(v.x(), monos[i][0]) * std::pow(v.y(), monos[i][1]) *
             std::pow(v.z(), monos[i][2]);
      return s;
    };
    const auto [lhs, rhs] = santalo_sides(F, gs);
    REQUIRE(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("holder chain: equality for constants, slack for perturbed metrics") {
  const auto grid = make_spherical_grid(3);
  const GreatCircleSpace gs{&grid, 256};

  const auto flat = holder_chain(conformal_constant(1.0), gs);
  REQUIRE(flat.all_ok());
  REQUIRE(std::abs(flat.min_holder_margin) < 1e-9);  // Cauchy-Schwarz equality
  REQUIRE(flat.area_from_circles == Catch::Approx(flat.area_sphere).epsilon(1e-9));

  const auto scaled = holder_chain(conformal_constant(3.0), gs);
  REQUIRE(scaled.all_ok());
  REQUIRE(std::abs(scaled.min_holder_margin) < 1e-8);

  const auto metric = conformal_from_harmonics({{2, 0, 0.3}});
  const auto bumpy = holder_chain(metric, gs);
  REQUIRE(bumpy.all_ok());
  // f = exp(0.3 Y20) is constant along the equator (its value depends on z
  // only), so the global minimum margin is the equality case there.
  REQUIRE(bumpy.min_holder_margin >= -1e-9);
  REQUIRE(bumpy.min_holder_margin < 1e-6);
  REQUIRE(bumpy.aggregate_deficit > 0.0);

  // Equality iff constant along the circle: a meridian circle (pole on the
  // equator) sees varying f and must carry strict slack.
  auto margin_for_pole = [&](int pole) {
    double len = 0.0, q = 0.0;
    for (int k = 0; k < gs.n_t; ++k) {
      const double f = metric.factor(gs.circle_point(pole, k));
      len += f;
      q += f * f;
    }
    len *= 2.0 * kPi / gs.n_t;
    q *= 2.0 * kPi / gs.n_t;
    return std::sqrt(2.0 * kPi * q) - len;
  };
  int equator_pole = 0, meridian_pole = 0;
  for (int i = 0; i < grid.num_nodes(); ++i) {
    if (std::abs(grid.node(i).z()) > std::abs(grid.node(equator_pole).z())) equator_pole = i;
    if (std::abs(grid.node(i).z()) < std::abs(grid.node(meridian_pole).z())) meridian_pole = i;
  }
  REQUIRE(std::abs(margin_for_pole(equator_pole)) < 1e-9);
  REQUIRE(margin_for_pole(meridian_pole) > 1e-3);
}

TEST_CASE("green potential: linearity, parity, guards") {
  RadonMassSpec spec;
  spec.atoms = {{Vec3(0, 0, 1), 0.5}, {Vec3(0, 0, -1), -0.5}};
  const auto u = green_potential(spec);

  RadonMassSpec flipped = spec;
  for (auto& [p, a] : flipped.atoms) a = -a;
  const auto v = green_potential(flipped);
  for (const Vec3& x : fibonacci_sphere(50)) REQUIRE(v(x) == -u(x));

  RadonMassSpec extra;
  extra.atoms = {{Vec3(1, 0, 0), 0.25}, {Vec3(0, 1, 0), -0.25}};
  const auto w = green_potential(extra);
  RadonMassSpec both;
  both.atoms = spec.atoms;
  both.atoms.insert(both.atoms.end(), extra.atoms.begin(), extra.atoms.end());
  const auto uw = green_potential(both);
  for (const Vec3& x : fibonacci_sphere(50))
    REQUIRE(uw(x) == Catch::Approx(u(x) + w(x)).margin(1e-13));

  RadonMassSpec zero;
  REQUIRE(green_potential(zero)(Vec3(0, 0, 1)) == 0.0);

  RadonMassSpec heavy;
  heavy.atoms = {{Vec3(0, 0, 1), 2.0 * kPi}, {Vec3(0, 0, -1), -2.0 * kPi}};
  REQUIRE_THROWS_AS(green_potential(heavy), DegenerateMassError);

  RadonMassSpec unbalanced;
  unbalanced.atoms = {{Vec3(0, 0, 1), 0.5}};
  REQUIRE_THROWS_AS(green_potential(unbalanced), InvariantError);
}

TEST_CASE("green potential: cotangent-Laplacian recovers the atomic masses") {
  // Delta u = -mu for zero-total-mass mu with this kernel normalization: the
  // integrated cotangent Laplacian summed over a band around an atom of mass
  // a recovers -a up to quadrature error.
  const auto grid = make_spherical_grid(4);
  const Vec3 site = Vec3(0.05, 0.03, 1.0).normalized();  // generic, off every node
  double nearest = 2.0;
  for (int i = 0; i < grid.num_nodes(); ++i)
    nearest = std::min(nearest, (grid.node(i) - site).norm());
  REQUIRE(nearest > 1e-3);

  const double a = 0.5;
  RadonMassSpec spec;
  spec.atoms = {{site, a}, {-site, -a}};
  const auto u = green_potential(spec);
  std::vector<double> uv(grid.num_nodes());
  for (int i = 0; i < grid.num_nodes(); ++i) uv[i] = u(grid.node(i));

  // Integrated cotangent Laplacian on the icosphere mesh.
  std::vector<double> lap(grid.num_nodes(), 0.0);
  const auto& mesh = grid.mesh;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3], o = t[(k + 2) % 3];
      const Vec3 e1 = mesh.vertices[i] - mesh.vertices[o];
      const Vec3 e2 = mesh.vertices[j] - mesh.vertices[o];
      const double cot = e1.dot(e2) / e1.cross(e2).norm();
      lap[i] += 0.5 * cot * (uv[j] - uv[i]);
      lap[j] += 0.5 * cot * (uv[i] - uv[j]);
    }
  }
  double band_north = 0.0, band_south = 0.0;
  for (int i = 0; i < grid.num_nodes(); ++i) {
    if ((grid.node(i) - site).norm() < 0.35) band_north += lap[i];
    if ((grid.node(i) + site).norm() < 0.35) band_south += lap[i];
  }
  REQUIRE(band_north == Catch::Approx(-a).epsilon(0.1));
  REQUIRE(band_south == Catch::Approx(a).epsilon(0.1));
}

TEST_CASE("cone metric from an even atomic measure runs through the pipeline") {
  const double a = 0.8;
  RadonMassSpec spec;
  const Vec3 y1 = Vec3(0.3, 0.2, 1.0).normalized();
  const Vec3 y2 = Vec3(1.0, -0.4, 0.1).normalized();
  spec.atoms = {{y1, a}, {-y1, a}, {y2, -a}, {-y2, -a}};
  const auto metric = conformal_from_atoms(spec);
  const auto grid = make_spherical_grid(3);
  const auto values = conformal_node_values(metric, grid);
  for (const double f : values) REQUIRE(f > 0.0);

  const auto sys = conformal_systole(metric, 3);
  REQUIRE(sys.sys > 0.0);
  const auto var = variance_remainder(metric, grid);
  REQUIRE(var.ok);
}

TEST_CASE("variance remainder: equality for constants, slack along the family") {
  const auto grid = make_spherical_grid(4);

  const auto flat = variance_remainder(conformal_constant(1.0), grid);
  REQUIRE(flat.ok);
  REQUIRE(flat.variance < 1e-12);
  REQUIRE(std::abs(flat.deficit) <= flat.tau);

  const auto scaled = variance_remainder(conformal_constant(1.7), grid);
  REQUIRE(scaled.variance < 1e-12);
  REQUIRE(std::abs(scaled.deficit) <= scaled.tau);

  // Rigidity direction along f = exp(t Y20): deficit and variance grow
  // together from the round case and the remainder inequality keeps slack.
  double prev_deficit = -1e9, prev_var = -1.0;
  for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto rep = variance_remainder(conformal_from_harmonics({{2, 0, t}}), grid);
    REQUIRE(rep.ok);
    REQUIRE(rep.variance >= prev_var - 1e-12);
    if (t > 0.0) REQUIRE(rep.deficit >= prev_deficit - rep.tau);
    REQUIRE(rep.variance <= (rep.deficit + rep.tau) / (2.0 * kPi));
    prev_deficit = rep.deficit;
    prev_var = rep.variance;
  }
}
