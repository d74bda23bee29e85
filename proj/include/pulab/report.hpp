#pragma once

// JSON assembly for the CLI subcommands that bundle several conformal checks.

#include "pulab/conformal.hpp"
#include "pulab/io.hpp"

namespace pulab {

inline json holder_report_to_json(const HolderChainReport& rep) {
  return {{"circles", rep.circles},
          {"sys", rep.sys},
          {"tau_chain", rep.tau_chain},
          {"min_holder_margin", rep.min_holder_margin},
          {"min_length_margin", rep.min_length_margin},
          {"holder_ok", rep.holder_ok},
          {"length_ok", rep.length_ok},
          {"area_sphere", rep.area_sphere},
          {"area_from_circles", rep.area_from_circles},
          {"aggregate_deficit", rep.aggregate_deficit},
          {"aggregate_ok", rep.aggregate_ok}};
}

inline json variance_report_to_json(const VarianceReport& rep) {
  return {{"area_quotient", rep.area_quotient},
          {"sys", rep.sys},
          {"deficit", rep.deficit},
          {"variance", rep.variance},
          {"bound", rep.bound},
          {"tau", rep.tau},
          {"ok", rep.ok}};
}

// The Santalo verification bundle: identity sides for the standard test
// integrands, the per-circle chain summary and the variance remainder.
inline json santalo_report(const ConformalMetric& metric, const SphericalGrid& grid, int n_t,
                           int steiner, bool& all_ok) {
  const GreatCircleSpace gs{&grid, n_t};
  json integrands = json::array();
  const std::vector<std::pair<std::string, std::function<double(const Vec3&)>>> tests = {
      {"1", [](const Vec3&) { return 1.0; }},
      {"z^2", [](const Vec3& x) { return x.z() * x.z(); }},
      {"x^2 y^2", [](const Vec3& x) { return x.x() * x.x() * x.y() * x.y(); }},
      {"1 + Y20", [](const Vec3& x) { return 1.0 + real_sph_harmonic(2, 0, x); }},
  };
  all_ok = true;
  for (const auto& [name, F] : tests) {
    const auto [lhs, rhs] = santalo_sides(F, gs);
    const bool ok = std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(lhs));
    all_ok = all_ok && ok;
    integrands.push_back({{"F", name}, {"lhs", lhs}, {"rhs", rhs}, {"ok", ok}});
  }
  const auto chain = holder_chain(metric, gs, steiner);
  const auto var = variance_remainder(metric, grid, steiner);
  all_ok = all_ok && chain.all_ok() && var.ok;
  return {{"schema", kSchemaVersion},
          {"version", kVersion},
          {"grid_level", grid.level},
          {"n_t", n_t},
          {"quadrature_degree", grid.quadrature_degree},
          {"integrands", integrands},
          {"holder_chain", holder_report_to_json(chain)},
          {"variance", variance_report_to_json(var)}};
}

}  // namespace pulab
