#pragma once

// Conformal metrics f^2 g0 on the round sphere (even under the antipodal
// map, so they descend to RP^2): areas, quotient systoles on the conformally
// weighted geodesic graph, the great-circle integral-geometry identity, the
// Holder chain, Green-potential cone metrics and the variance remainder.
//
// Green kernel: G(x, y) = -(1/2 pi) log(sin(d(x,y)/2)) up to an additive
// constant that cancels for zero-total-mass measures. With f = e^u and
// u(x) = sum_i a_i G(x, y_i), the metric f^2 g0 has cone angle 2 pi - a_i at
// y_i, and Delta_{g0} u = -mu away from normalization.

#include "pulab/geodesic.hpp"
#include "pulab/harmonics.hpp"
#include "pulab/sphere_grid.hpp"

namespace pulab {

struct RadonMassSpec {
  std::vector<std::pair<Vec3, double>> atoms;  // (unit point, mass)

  double total_mass() const {
    double s = 0.0;
    for (const auto& [p, a] : atoms) s += a;
    return s;
  }
};

inline void validate_mass_spec(const RadonMassSpec& spec) {
  double scale = 0.0;
  for (const auto& [p, a] : spec.atoms) {
    if (p.norm() <= 0.0) throw InvariantError("mass spec: atom at the origin");
    if (a >= 2.0 * kPi) throw DegenerateMassError("mass spec: atom mass >= 2 pi");
    scale += std::abs(a);
  }
  if (std::abs(spec.total_mass()) > 1e-12 * std::max(1.0, scale))
    throw InvariantError("mass spec: nonzero total mass");
}

// sin(d/2) equals half the chord, so the kernel needs no trigonometry.
inline double green_kernel(const Vec3& x, const Vec3& y) {
  const double half_chord = 0.5 * (x - y).norm();
  return -std::log(half_chord) / (2.0 * kPi);
}

inline std::function<double(const Vec3&)> green_potential(RadonMassSpec spec) {
  validate_mass_spec(spec);
  for (auto& [p, a] : spec.atoms) p.normalize();
  return [spec](const Vec3& x) {
    const Vec3 u = x / x.norm();
    double s = 0.0;
    for (const auto& [p, a] : spec.atoms) s += a * green_kernel(u, p);
    return s;
  };
}

struct ConformalMetric {
  std::function<double(const Vec3&)> factor;  // f on the unit sphere, f >= 0
  bool structurally_even = false;             // even by construction
};

inline ConformalMetric conformal_constant(double c) {
  if (!(c > 0.0)) throw InvariantError("conformal factor must be positive");
  return {[c](const Vec3&) { return c; }, true};
}

// u = sum of coeff * Y_lm, f = e^u. Only even-degree harmonics descend to
// RP^2; an odd term is rejected outright.
inline ConformalMetric conformal_from_harmonics(
    const std::vector<std::tuple<int, int, double>>& terms) {
  for (const auto& [l, m, coeff] : terms)
    if (l % 2 != 0 && coeff != 0.0)
      throw EvennessError("harmonic metric: odd-degree term is not antipodally even");
  return {[terms](const Vec3& x) {
            double u = 0.0;
            for (const auto& [l, m, coeff] : terms) u += coeff * real_sph_harmonic(l, m, x);
            return std::exp(u);
          },
          true};
}

inline ConformalMetric conformal_from_atoms(const RadonMassSpec& spec) {
  auto u = green_potential(spec);
  // Even iff the atomic measure is antipodally symmetric; verified when node
  // values are extracted.
  return {[u](const Vec3& x) { return std::exp(u(x)); }, false};
}

// Factor values at the grid nodes with exact evenness: each antipodal orbit
// is evaluated once at its representative and cloned.
inline std::vector<double> conformal_node_values(const ConformalMetric& c,
                                                 const SphericalGrid& grid) {
  const int n = grid.num_nodes();
  std::vector<double> f(n, -1.0);
  for (int i = 0; i < n; ++i) {
    const int j = grid.mesh.antipode[i];
    if (j < i) continue;
    const double fi = c.factor(grid.node(i));
    if (!c.structurally_even) {
      const double fj = c.factor(grid.node(j));
      if (std::abs(fi - fj) > 1e-8 * std::max({1.0, std::abs(fi), std::abs(fj)}))
        throw EvennessError("conformal factor is not even under the antipodal map");
    }
    if (!(fi >= 0.0)) throw InvariantError("conformal factor is negative");
    f[i] = f[j] = fi;
  }
  return f;
}

// Area of (S^2, f^2 g0); the quotient RP^2 area is half.
inline double conformal_area(const ConformalMetric& c, const SphericalGrid& grid) {
  const auto f = conformal_node_values(c, grid);
  double s = 0.0;
  for (int i = 0; i < grid.num_nodes(); ++i) s += grid.weights[i] * f[i] * f[i];
  return s;
}

// Reweights the Euclidean graph by the conformal factor sampled at edge
// midpoints (projected to the sphere). The factor is evaluated at a canonical
// representative of each arc's antipodal orbit, so mirrored arcs stay
// bitwise equal and the antipodal automorphism survives reweighting.
inline void reweight_conformal(GeodesicGraph& g, const ConformalMetric& c) {
  g.max_edge = 0.0;
  for (int u = 0; u < g.num_nodes(); ++u) {
    for (int k = g.head[u]; k < g.head[u + 1]; ++k) {
      const int v = g.adj[k];
      int a = std::min(u, v), b = std::max(u, v);
      const int a2 = std::min(g.node_antipode[u], g.node_antipode[v]);
      const int b2 = std::max(g.node_antipode[u], g.node_antipode[v]);
      if (std::make_pair(a2, b2) < std::make_pair(a, b)) {
        a = a2;
        b = b2;
      }
      const Vec3 mid = (g.pos[a] + g.pos[b]).normalized();
      const double factor = c.factor(mid);
      if (!(factor >= 0.0) || !std::isfinite(factor))
        throw InvariantError("conformal factor invalid at an edge midpoint");
      g.weight[k] *= factor;
      g.max_edge = std::max(g.max_edge, g.weight[k]);
    }
  }
}

struct ConformalSystole {
  double sys = 0.0;
  int witness = -1;
  double tau_geo = 0.0;
};

// Quotient systole of (RP^2, f^2 g0): minimal antipodal distance on the
// reweighted icosphere graph, resolved coarse-to-fine as in analyze_body.
inline ConformalSystole conformal_systole(const ConformalMetric& c, int level, int steiner = 3,
                                          int scan_cap = 700, int band_cap = 48) {
  int scan_level = 0;
  for (int l = 0; l <= level; ++l)
    if (10 * (1 << (2 * l)) + 2 <= scan_cap) scan_level = l;

  std::vector<int> seeds;
  SystoleResult sys_res;
  GeodesicGraph g;
  for (int l = scan_level; l <= level; ++l) {
    g = build_graph(make_icosphere(l), steiner);
    reweight_conformal(g, c);
    if (l == scan_level) {
      seeds.resize(g.num_vertex_nodes);
      for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = static_cast<int>(i);
    }
    const double band = 4.0 * g.max_edge;
    sys_res = systole_scan(g, seeds, band);
    if (l == level) break;
    std::vector<int> sorted_seeds = seeds;
    std::sort(sorted_seeds.begin(), sorted_seeds.end());
    sorted_seeds.erase(std::unique(sorted_seeds.begin(), sorted_seeds.end()), sorted_seeds.end());
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t i = 0; i < sorted_seeds.size(); ++i)
      if (std::isfinite(sys_res.seed_values[i]) && sys_res.seed_values[i] <= sys_res.sys + band)
        ranked.emplace_back(sys_res.seed_values[i], sorted_seeds[i]);
    std::sort(ranked.begin(), ranked.end());
    if (static_cast<int>(ranked.size()) > band_cap) ranked.resize(band_cap);
    seeds.clear();
    for (const auto& [value, id] : ranked) seeds.push_back(id);
    if (seeds.empty()) seeds.push_back(sys_res.witness);
  }
  return {sys_res.sys, sys_res.witness, tau_geo(g)};
}

// The space of oriented great circles, parametrized by poles at the grid
// nodes with the grid weights as the measure nu (total 4 pi, validated by the
// F == 1 identity), and n_t arc quadrature points per circle.
struct GreatCircleSpace {
  const SphericalGrid* grid = nullptr;
  int n_t = 256;

  int num_circles() const { return grid->num_nodes(); }

  Vec3 circle_point(int pole_index, int k) const {
    Vec3 u, v;
    plane_basis(grid->node(pole_index), u, v);
    const double t = 2.0 * kPi * (k + 0.5) / n_t;
    return std::cos(t) * u + std::sin(t) * v;
  }
};

// Both sides of the great-circle average identity:
//   lhs = integral of F over S^2,
//   rhs = (1/2 pi) integral over circles of the arc integral of F.
inline std::pair<double, double> santalo_sides(const std::function<double(const Vec3&)>& F,
                                               const GreatCircleSpace& gs) {
  const SphericalGrid& grid = *gs.grid;
  const double lhs = grid_integral(grid, F);
  double rhs = 0.0;
  for (int p = 0; p < gs.num_circles(); ++p) {
    double arc = 0.0;
    for (int k = 0; k < gs.n_t; ++k) arc += F(gs.circle_point(p, k));
    rhs += grid.weights[p] * arc / gs.n_t;  // (1/2pi) * w * (2pi/n_t) * sum
  }
  return {lhs, rhs};
}

struct HolderChainReport {
  int circles = 0;
  double sys = 0.0;
  double tau_chain = 0.0;
  double min_holder_margin = 0.0;  // min over circles of sqrt(2 pi q) - len (>= 0 exactly)
  double min_length_margin = 0.0;  // min over circles of len - (2 sys - tau)
  bool holder_ok = false;
  bool length_ok = false;
  double area_sphere = 0.0;        // grid quadrature of f^2
  double area_from_circles = 0.0;  // same area recovered through the circle average
  double aggregate_deficit = 0.0;  // quotient area - (2/pi) sys^2
  bool aggregate_ok = false;

  bool all_ok() const { return holder_ok && length_ok && aggregate_ok; }
};

// Per-circle record of the chain
//   sqrt(2 pi) (integral f^2 dt)^(1/2) >= integral f dt = length_g(circle)
//   length_g(circle) >= 2 sys - tau,
// aggregated back to the quotient-area lower bound (2/pi) sys^2. The Holder
// (Cauchy-Schwarz) step is checked on the shared quadrature samples, where it
// holds exactly.
inline HolderChainReport holder_chain(const ConformalMetric& c, const GreatCircleSpace& gs,
                                      int steiner = 3) {
  const SphericalGrid& grid = *gs.grid;
  const ConformalSystole sys = conformal_systole(c, grid.level, steiner);

  HolderChainReport rep;
  rep.circles = gs.num_circles();
  rep.sys = sys.sys;
  rep.tau_chain = 2.0 * sys.tau_geo;
  rep.min_holder_margin = std::numeric_limits<double>::infinity();
  rep.min_length_margin = std::numeric_limits<double>::infinity();

  double rhs_area = 0.0;
  for (int p = 0; p < gs.num_circles(); ++p) {
    double len = 0.0, q = 0.0;
    for (int k = 0; k < gs.n_t; ++k) {
      const double f = c.factor(gs.circle_point(p, k));
      len += f;
      q += f * f;
    }
    len *= 2.0 * kPi / gs.n_t;
    q *= 2.0 * kPi / gs.n_t;
    rhs_area += grid.weights[p] * q / (2.0 * kPi);
    rep.min_holder_margin = std::min(rep.min_holder_margin, std::sqrt(2.0 * kPi * q) - len);
    rep.min_length_margin =
        std::min(rep.min_length_margin, len - (2.0 * sys.sys - rep.tau_chain));
  }
  rep.area_from_circles = rhs_area;
  rep.area_sphere = conformal_area(c, grid);
  rep.holder_ok = rep.min_holder_margin >= -1e-9;
  rep.length_ok = rep.min_length_margin >= 0.0;

  const double area_q = rep.area_sphere / 2.0;
  rep.aggregate_deficit = area_q - 2.0 / kPi * sys.sys * sys.sys;
  const double tau_pu =
      2.0 / kPi * ((sys.sys + sys.tau_geo) * (sys.sys + sys.tau_geo) - sys.sys * sys.sys);
  rep.aggregate_ok = rep.aggregate_deficit >= -tau_pu;
  return rep;
}

struct VarianceReport {
  double area_quotient = 0.0;
  double sys = 0.0;
  double deficit = 0.0;   // area_quotient - (2/pi) sys^2
  double variance = 0.0;  // Var of f under the normalized round measure
  double bound = 0.0;     // 2 pi Var
  double tau = 0.0;       // discretization budget on the deficit
  bool ok = false;
};

// Variance remainder: deficit >= 2 pi Var(f) with the variance taken under
// the grid weights normalized to a probability measure.
inline VarianceReport variance_remainder(const ConformalMetric& c, const SphericalGrid& grid,
                                         int steiner = 3) {
  const auto f = conformal_node_values(c, grid);
  double mean = 0.0, mean_sq = 0.0;
  for (int i = 0; i < grid.num_nodes(); ++i) {
    const double w = grid.weights[i] / (4.0 * kPi);
    mean += w * f[i];
    mean_sq += w * f[i] * f[i];
  }
  const ConformalSystole sys = conformal_systole(c, grid.level, steiner);

  VarianceReport rep;
  rep.area_quotient = conformal_area(c, grid) / 2.0;
  rep.sys = sys.sys;
  rep.deficit = rep.area_quotient - 2.0 / kPi * sys.sys * sys.sys;
  rep.variance = std::max(0.0, mean_sq - mean * mean);
  rep.bound = 2.0 * kPi * rep.variance;
  rep.tau = 2.0 / kPi * ((sys.sys + sys.tau_geo) * (sys.sys + sys.tau_geo) - sys.sys * sys.sys);
  rep.ok = rep.deficit >= rep.bound - rep.tau;
  return rep;
}

}  // namespace pulab
