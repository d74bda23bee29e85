#pragma once

// Parametric family sweeps, the empirical remainder envelope, the sandwich
// constant fits and the thin-body collapse study.

#include <json.hpp>

#include "pulab/families.hpp"
#include "pulab/geodesic.hpp"
#include "pulab/io.hpp"
#include "pulab/version.hpp"

namespace pulab {

struct FamilySpec {
  enum class Kind { Ellipsoid, RandomPolytope, CappedCylinder };
  Kind kind = Kind::Ellipsoid;
  std::string name = "ellipsoid";

  std::vector<std::array<double, 3>> ellipsoid_axes;
  std::vector<double> cylinder_heights;
  int polytope_count = 20;
  int polytope_points = kDefaults.polytope_points;
  std::uint64_t seed = kDefaults.seed;

  int level = kDefaults.level;  // -1: auto by the max-edge rule
  int steiner = kDefaults.steiner;
  double eps = kDefaults.eps;

  int size() const {
    switch (kind) {
      case Kind::Ellipsoid:
        return static_cast<int>(ellipsoid_axes.size());
      case Kind::RandomPolytope:
        return polytope_count;
      case Kind::CappedCylinder:
        return static_cast<int>(cylinder_heights.size());
    }
    return 0;
  }
};

inline FamilySpec family_spec_from_json(const json& j) {
  FamilySpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  spec.name = kind;
  if (kind == "ellipsoid") {
    spec.kind = FamilySpec::Kind::Ellipsoid;
    for (const auto& axes : j.at("axes")) {
      if (!axes.is_array() || axes.size() != 3)
        throw ParseError("ellipsoid axes entries are [a, b, c]", 0);
      spec.ellipsoid_axes.push_back(
          {axes[0].get<double>(), axes[1].get<double>(), axes[2].get<double>()});
    }
  } else if (kind == "random_polytope") {
    spec.kind = FamilySpec::Kind::RandomPolytope;
    spec.polytope_count = j.value("count", 20);
    spec.polytope_points = j.value("points", kDefaults.polytope_points);
  } else if (kind == "capped_cylinder") {
    spec.kind = FamilySpec::Kind::CappedCylinder;
    for (const auto& h : j.at("heights")) spec.cylinder_heights.push_back(h.get<double>());
  } else {
    throw ParseError("unknown family kind '" + kind + "'", 0);
  }
  spec.seed = j.value("seed", kDefaults.seed);
  spec.level = j.value("level", kDefaults.level);
  spec.steiner = j.value("steiner", kDefaults.steiner);
  spec.eps = j.value("eps", kDefaults.eps);
  return spec;
}

// Smallest refinement level whose mesh resolves the systole: max edge below
// sys_estimate / 20, capped by the level count and a vertex budget (strongly
// stretched bodies keep long polar edges at any affordable level; tau_geo
// carries the residual budget). The estimate comes from a coarse pipeline.
inline int choose_level(const SymmetricConvexMesh& base, int steiner,
                        int cap = kDefaults.max_auto_level, int vertex_budget = 4500) {
  SymmetricConvexMesh probe = refine(base, 2);
  const GeodesicGraph pg = build_graph(probe, std::max(1, steiner));
  const double sys_estimate = systole(pg).sys;

  SymmetricConvexMesh m = base;
  for (int level = 0; level <= cap; ++level) {
    if (m.max_edge_length() < sys_estimate / 20.0) return level;
    if (level == cap) break;
    m = refine_once(m);
    if (m.num_vertices() > vertex_budget) return level;
  }
  return cap;
}

struct SweepRow {
  std::string family;
  std::string param;
  PuReport report;
  bool ok = false;
  std::string status;  // "ok" or the error message
};

namespace detail {

inline std::string short_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline SymmetricConvexMesh family_member(const FamilySpec& spec, int index, std::string& param) {
  switch (spec.kind) {
    case FamilySpec::Kind::Ellipsoid: {
      const auto& axes = spec.ellipsoid_axes[index];
      param = short_number(axes[0]) + "x" + short_number(axes[1]) + "x" + short_number(axes[2]);
      return make_ellipsoid(axes[0], axes[1], axes[2], 0);
    }
    case FamilySpec::Kind::RandomPolytope: {
      param = std::to_string(index);
      // Independent deterministic stream per body.
      const std::uint64_t body_seed = spec.seed * 0x9e3779b97f4a7c15ULL + index;
      return make_random_symmetric_polytope(spec.polytope_points, body_seed);
    }
    case FamilySpec::Kind::CappedCylinder: {
      const double h = spec.cylinder_heights[index];
      param = short_number(h);
      return make_capped_cylinder(h, 0);
    }
  }
  throw InvariantError("family_member: bad kind");
}

}  // namespace detail

// One PuReport row per family member. Individual failures are recorded in the
// row status and the sweep continues. Deterministic for a fixed spec.
inline std::vector<SweepRow> sweep(const FamilySpec& spec, int threads = 1) {
  const int n = spec.size();
  if (n == 0) throw InvariantError("sweep: empty family");
  std::vector<SweepRow> rows(n);
  parallel_for(n, threads, [&](int i) {
    SweepRow& row = rows[i];
    row.family = spec.name;
    try {
      const SymmetricConvexMesh base = detail::family_member(spec, i, row.param);
      const int level = spec.level >= 0 ? spec.level : choose_level(base, spec.steiner);
      row.report = analyze_body(base, level, spec.steiner, spec.eps);
      row.ok = true;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.ok = false;
      row.status = e.what();
      for (char& c : row.status)
        if (c == ',' || c == '\n') c = ';';
    }
  });
  return rows;
}

inline std::string sweep_csv_header() {
  return "family,param,sys,area,R,r,a,b,c,deficit,t,L,D,diam,status";
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = sweep_csv_header() + "\n";
  for (const auto& row : rows) {
    out += row.family + "," + row.param + ",";
    if (row.ok) {
      const PuReport& r = row.report;
      for (const double x : {r.sys, r.area, r.R, r.r, r.mvee_axes[0], r.mvee_axes[1],
                             r.mvee_axes[2], r.deficit, r.t, r.L, r.D, r.diam})
        out += format_double(x) + ",";
    } else {
      out += ",,,,,,,,,,,,";
    }
    out += row.status + "\n";
  }
  return out;
}

inline json sweep_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json o = {{"family", row.family}, {"param", row.param}, {"status", row.status}};
    if (row.ok) {
      const PuReport& r = row.report;
      o["sys"] = r.sys;
      o["area"] = r.area;
      o["R"] = r.R;
      o["r"] = r.r;
      o["a"] = r.mvee_axes[0];
      o["b"] = r.mvee_axes[1];
      o["c"] = r.mvee_axes[2];
      o["deficit"] = r.deficit;
      o["t"] = r.t;
      o["L"] = r.L;
      o["D"] = r.D;
      o["diam"] = r.diam;
    }
    arr.push_back(o);
  }
  return arr;
}

// Empirical constants for the sandwich proportionality relations
// sys ~ b, r ~ a, R ~ c, area ~ b c (MVEE semi-axes a <= b <= c). The ratios
// are scale-invariant, so no normalization pass is needed.
struct RelationFit {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool flagged = false;  // spread beyond a uniform-constant reading
};

struct StepOneFit {
  RelationFit sys_over_b, r_over_a, R_over_c, area_over_bc;
  int samples = 0;
};

inline StepOneFit step_one_fit(const std::vector<SweepRow>& rows) {
  StepOneFit fit;
  auto update = [](RelationFit& f, double ratio, bool first) {
    if (first) {
      f.min_ratio = f.max_ratio = ratio;
    } else {
      f.min_ratio = std::min(f.min_ratio, ratio);
      f.max_ratio = std::max(f.max_ratio, ratio);
    }
  };
  for (const auto& row : rows) {
    if (!row.ok) continue;
    const PuReport& r = row.report;
    const double a = r.mvee_axes[0], b = r.mvee_axes[1], c = r.mvee_axes[2];
    const bool first = fit.samples == 0;
    update(fit.sys_over_b, r.sys / b, first);
    update(fit.r_over_a, r.r / a, first);
    update(fit.R_over_c, r.R / c, first);
    update(fit.area_over_bc, r.area / (b * c), first);
    ++fit.samples;
  }
  if (fit.samples == 0) throw InvariantError("step_one_fit: no successful rows");
  const double drift = 4.0;
  for (RelationFit* f : {&fit.sys_over_b, &fit.r_over_a, &fit.R_over_c, &fit.area_over_bc})
    f->flagged = f->max_ratio > drift * f->min_ratio;
  return fit;
}

// Lower envelope of the deficit over t = (R - r) / sys in the cumulative
// ">= t" form (non-increasing by construction), with a linear fit over the
// top decade of t.
struct EnvelopeEstimate {
  std::vector<double> bin_edges;
  std::vector<double> lambda_hat;  // min deficit over rows with t >= edge
  std::vector<int> counts;         // rows with t in [edge_i, edge_{i+1})
  double slope = 0.0;
  double intercept = 0.0;
  double rel_residual = 0.0;
  double fit_lo = 0.0, fit_hi = 0.0;
  int fit_bins = 0;
  // Semantics: an empirical envelope over parametric families upper-bounds
  // the true remainder function; it is not the infimum over all metrics.
  std::string note = "empirical upper bound of the remainder envelope over sampled families";
};

inline EnvelopeEstimate envelope(const std::vector<SweepRow>& rows, int bins = kDefaults.bins) {
  if (bins < 2) throw InvariantError("envelope: bins must be >= 2");
  std::vector<std::pair<double, double>> samples;  // (t, deficit)
  for (const auto& row : rows)
    if (row.ok) samples.emplace_back(row.report.t, row.report.deficit);
  if (samples.empty()) throw InvariantError("envelope: no successful rows");
  std::sort(samples.begin(), samples.end());
  const double t_max = samples.back().first;

  EnvelopeEstimate est;
  // Linear edges below 1, geometric above.
  if (t_max <= 1.0) {
    for (int i = 0; i < bins; ++i) est.bin_edges.push_back(t_max * i / bins);
  } else {
    const int lin = bins / 2, log = bins - lin;
    for (int i = 0; i < lin; ++i) est.bin_edges.push_back(static_cast<double>(i) / lin);
    for (int i = 1; i <= log; ++i)
      est.bin_edges.push_back(std::pow(t_max, static_cast<double>(i) / log));
  }

  // Suffix minima of the deficit over t' >= t.
  std::vector<double> suffix(samples.size());
  double running = std::numeric_limits<double>::infinity();
  for (int i = static_cast<int>(samples.size()) - 1; i >= 0; --i) {
    running = std::min(running, samples[i].second);
    suffix[i] = running;
  }
  for (std::size_t b = 0; b < est.bin_edges.size(); ++b) {
    const double edge = est.bin_edges[b];
    const auto it = std::lower_bound(samples.begin(), samples.end(), std::make_pair(edge, -1e300));
    est.lambda_hat.push_back(it == samples.end() ? std::numeric_limits<double>::quiet_NaN()
                                                 : suffix[it - samples.begin()]);
    const double hi = b + 1 < est.bin_edges.size() ? est.bin_edges[b + 1]
                                                   : std::numeric_limits<double>::infinity();
    int count = 0;
    for (const auto& [t, d] : samples) count += (t >= edge && t < hi) ? 1 : 0;
    est.counts.push_back(count);
  }

  // Least-squares line over the top decade of t.
  est.fit_hi = t_max;
  est.fit_lo = t_max / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int nfit = 0;
  for (std::size_t b = 0; b < est.bin_edges.size(); ++b) {
    const double x = est.bin_edges[b];
    if (x < est.fit_lo || std::isnan(est.lambda_hat[b])) continue;
    const double y = est.lambda_hat[b];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++nfit;
  }
  est.fit_bins = nfit;
  if (nfit >= 2) {
    const double det = nfit * sxx - sx * sx;
    est.slope = (nfit * sxy - sx * sy) / det;
    est.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (std::size_t b = 0; b < est.bin_edges.size(); ++b) {
      const double x = est.bin_edges[b];
      if (x < est.fit_lo || std::isnan(est.lambda_hat[b])) continue;
      const double r = est.lambda_hat[b] - (est.slope * x + est.intercept);
      ss += r * r;
    }
    est.rel_residual = std::sqrt(ss / nfit) / std::max(1e-300, std::abs(sy / nfit));
  }
  return est;
}

inline std::string envelope_to_csv(const EnvelopeEstimate& est) {
  std::string out = "t,lambda_hat,count\n";
  for (std::size_t i = 0; i < est.bin_edges.size(); ++i)
    out += format_double(est.bin_edges[i]) + "," + format_double(est.lambda_hat[i]) + "," +
           std::to_string(est.counts[i]) + "\n";
  return out;
}

inline json envelope_to_json(const EnvelopeEstimate& est) {
  return {{"schema", kSchemaVersion}, {"version", kVersion},
          {"bin_edges", est.bin_edges},  {"lambda_hat", est.lambda_hat},
          {"counts", est.counts},       {"slope", est.slope},
          {"intercept", est.intercept}, {"rel_residual", est.rel_residual},
          {"fit_lo", est.fit_lo},       {"fit_hi", est.fit_hi},
          {"fit_bins", est.fit_bins},   {"note", est.note}};
}

// Thin oblate bodies (a, 1, c), a -> 0: the systole approaches the shadow
// width, the quotient area approaches the shadow area, and the unnormalized
// deficit stays near A (1 - 8 / pi^2).
struct CollapseRow {
  double a = 0.0, c = 0.0;
  double sys = 0.0, width = 0.0, rel_gap = 0.0;
  double area_quotient = 0.0, shadow_area = 0.0, area_rel_gap = 0.0;
  double deficit = 0.0;  // area_quotient - (2/pi) sys^2
  double bound = 0.0;    // shadow_area * (1 - 8 / pi^2)
  double ratio = 0.0;    // deficit / bound
  bool ok = false;
  std::string status;
};

inline std::vector<CollapseRow> collapse_study(const std::vector<double>& min_axis_grid,
                                               const std::vector<double>& aspect_grid = {1.0},
                                               int level = kDefaults.level,
                                               int steiner = kDefaults.steiner, int threads = 1) {
  if (min_axis_grid.empty()) throw InvariantError("collapse_study: empty grid");
  std::vector<std::pair<double, double>> params;
  for (const double c : aspect_grid)
    for (const double a : min_axis_grid) params.emplace_back(a, c);
  std::vector<CollapseRow> rows(params.size());
  parallel_for(static_cast<int>(params.size()), threads, [&](int i) {
    CollapseRow& row = rows[i];
    row.a = params[i].first;
    row.c = params[i].second;
    try {
      const SymmetricConvexMesh base = make_ellipsoid(row.a, 1.0, row.c, 0);
      const int lvl = level >= 0 ? level : choose_level(base, steiner);
      const PuReport rep = analyze_body(base, lvl, steiner);
      const auto shadow = planar_metrics(project_shadow(refine(base, lvl), Vec3(1, 0, 0)));
      row.sys = rep.sys;
      row.width = shadow.width;
      row.rel_gap = std::abs(rep.sys - shadow.width) / shadow.width;
      row.area_quotient = rep.area;
      row.shadow_area = shadow.area;
      row.area_rel_gap = std::abs(rep.area - shadow.area) / shadow.area;
      row.deficit = rep.area - 2.0 / kPi * rep.sys * rep.sys;
      row.bound = shadow.area * (1.0 - 8.0 / (kPi * kPi));
      row.ratio = row.deficit / row.bound;
      row.ok = true;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.ok = false;
      row.status = e.what();
      for (char& ch : row.status)
        if (ch == ',' || ch == '\n') ch = ';';
    }
  });
  return rows;
}

inline std::string collapse_to_csv(const std::vector<CollapseRow>& rows) {
  std::string out = "a,c,sys,W,rel_gap,area_q,A,area_rel_gap,deficit,bound,ratio,status\n";
  for (const auto& row : rows) {
    out += format_double(row.a) + "," + format_double(row.c) + ",";
    if (row.ok) {
      for (const double x : {row.sys, row.width, row.rel_gap, row.area_quotient, row.shadow_area,
                             row.area_rel_gap, row.deficit, row.bound, row.ratio})
        out += format_double(x) + ",";
    } else {
      out += ",,,,,,,,,";
    }
    out += row.status + "\n";
  }
  return out;
}

}  // namespace pulab
