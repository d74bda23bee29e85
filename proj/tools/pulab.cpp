// Command-line front end: per-surface analysis, family sweeps, great-circle
// identity verification, conformal metric reports, remainder envelopes and
// the thin-body collapse study. Reports go to stdout (or --out); logs go to
// stderr. Exit codes: 0 success, 2 invariant violation beyond tolerance,
// 3 parse error, 4 asymmetric mesh / odd metric / degenerate atom mass,
// 5 flat body, 1 unexpected failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "pulab/experiments.hpp"
#include "pulab/report.hpp"

using namespace pulab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitParse = 3;
constexpr int kExitAsymmetric = 4;
constexpr int kExitFlat = 5;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write '" + out_path + "'");
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  return j;
}

void require_not_flat(const SymmetricConvexMesh& m) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& v : m.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if ((hi - lo).minCoeff() <= kHullTolRel * (hi - lo).norm())
    throw FlatBodyError("mesh is flat within tolerance");
}

std::vector<SweepRow> run_families(const json& spec_json, int threads) {
  std::vector<SweepRow> rows;
  const auto run_one = [&](const json& j) {
    const FamilySpec spec = family_spec_from_json(j);
    auto part = sweep(spec, threads);
    rows.insert(rows.end(), part.begin(), part.end());
  };
  if (spec_json.contains("families")) {
    for (const auto& j : spec_json["families"]) run_one(j);
  } else {
    run_one(spec_json);
  }
  return rows;
}

int cmd_analyze(const std::string& mesh_path, int level, int steiner, double eps,
                const std::string& out, const std::string& loop_out) {
  SymmetricConvexMesh mesh = read_off_file(mesh_path);
  require_not_flat(mesh);
  validate_mesh(mesh);
  const int use_level = level >= 0 ? level : choose_level(mesh, steiner);
  std::cerr << "analyze: level " << use_level << ", steiner " << steiner << "\n";
  const PuReport rep = analyze_body(mesh, use_level, steiner, eps);
  emit(pu_report_to_json(rep).dump(2), out);
  if (!loop_out.empty()) {
    std::ofstream obj(loop_out);
    if (!obj) throw Error("cannot write '" + loop_out + "'");
    write_loop_obj(obj, rep.loop_points);
  }
  return rep.checks.all() ? kExitOk : kExitInvariant;
}

int cmd_santalo(const std::string& metric_path, int grid_level, int n_t, int steiner,
                const std::string& out) {
  const ConformalMetric metric =
      metric_path.empty() ? conformal_constant(1.0) : metric_from_json(load_json_file(metric_path));
  const SphericalGrid grid = make_spherical_grid(grid_level);
  bool all_ok = false;
  const json rep = santalo_report(metric, grid, n_t, steiner, all_ok);
  emit(rep.dump(2), out);
  return all_ok ? kExitOk : kExitInvariant;
}

int cmd_conformal(const std::string& metric_path, int grid_level, int steiner,
                  const std::string& out) {
  const ConformalMetric metric = metric_from_json(load_json_file(metric_path));
  const SphericalGrid grid = make_spherical_grid(grid_level);
  const auto values = conformal_node_values(metric, grid);
  const auto var = variance_remainder(metric, grid, steiner);
  const double fmin = *std::min_element(values.begin(), values.end());
  const double fmax = *std::max_element(values.begin(), values.end());
  const json rep = {{"schema", kSchemaVersion},
                    {"version", kVersion},
                    {"grid_level", grid_level},
                    {"area_sphere", 2.0 * var.area_quotient},
                    {"area_quotient", var.area_quotient},
                    {"sys", var.sys},
                    {"deficit", var.deficit},
                    {"variance", var.variance},
                    {"bound", var.bound},
                    {"tau", var.tau},
                    {"ok", var.ok},
                    {"f_min", fmin},
                    {"f_max", fmax}};
  emit(rep.dump(2), out);
  return var.ok ? kExitOk : kExitInvariant;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, int threads, bool as_json) {
  const auto rows = run_families(load_json_file(spec_path), threads);
  emit(as_json ? sweep_to_json(rows).dump(2) : sweep_to_csv(rows), out);
  int ok = 0;
  for (const auto& row : rows) ok += row.ok ? 1 : 0;
  std::cerr << "sweep: " << ok << "/" << rows.size() << " bodies ok\n";
  return ok > 0 ? kExitOk : kExitInvariant;
}

int cmd_envelope(const std::string& spec_path, int bins, const std::string& out, int threads,
                 bool as_json) {
  const auto rows = run_families(load_json_file(spec_path), threads);
  const auto est = envelope(rows, bins);
  emit(as_json ? envelope_to_json(est).dump(2) : envelope_to_csv(est), out);
  return kExitOk;
}

int cmd_collapse(const std::vector<double>& amin, const std::vector<double>& aspect, int level,
                 int steiner, const std::string& out, int threads) {
  const auto rows = collapse_study(amin, aspect, level, steiner, threads);
  emit(collapse_to_csv(rows), out);
  int ok = 0;
  for (const auto& row : rows) ok += row.ok ? 1 : 0;
  return ok > 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulab: systolic geometry of centrally symmetric convex surfaces"};
  app.set_version_flag("--version", std::string("pulab ") + kVersion);
  app.require_subcommand(1);

  std::string mesh_path, metric_path, spec_path, out_path, loop_out;
  int level = kDefaults.level;
  int steiner = kDefaults.steiner;
  int grid_level = kDefaults.grid_level;
  int n_t = kDefaults.n_t;
  int bins = kDefaults.bins;
  int threads = kDefaults.threads;
  double eps = kDefaults.eps;
  bool as_json = false;
  std::vector<double> amin = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> aspect = {1.0};

  auto* analyze = app.add_subcommand("analyze", "Pu report for a symmetric convex OFF mesh");
  analyze->add_option("mesh", mesh_path, "input OFF file")->required();
  analyze->add_option("--level", level, "refinement level; -1 picks max edge < sys/20 (default -1)");
  analyze->add_option("--steiner", steiner, "Steiner points per edge (default 3)");
  analyze->add_option("--eps", eps, "MVEE relative tolerance (default 1e-6)");
  analyze->add_option("--out", out_path, "write the JSON report here instead of stdout");
  analyze->add_option("--loop-out", loop_out, "write the systolic loop as an OBJ polyline");

  auto* santalo = app.add_subcommand("santalo", "great-circle identity, chain and variance checks");
  santalo->add_option("--metric", metric_path, "metric JSON (default: round metric)");
  santalo->add_option("--grid-level", grid_level, "icosphere grid level (default 5)");
  santalo->add_option("--nt", n_t, "arc quadrature points per circle (default 256)");
  santalo->add_option("--steiner", steiner, "Steiner points per edge (default 3)");
  santalo->add_option("--out", out_path, "write the JSON report here instead of stdout");

  auto* conformal = app.add_subcommand("conformal", "area/systole/variance report for a metric");
  conformal->add_option("--metric", metric_path, "metric JSON")->required();
  conformal->add_option("--grid-level", grid_level, "icosphere grid level (default 5)");
  conformal->add_option("--steiner", steiner, "Steiner points per edge (default 3)");
  conformal->add_option("--out", out_path, "write the JSON report here instead of stdout");

  auto* sweep_cmd = app.add_subcommand("sweep", "PuReport table over a body family");
  sweep_cmd->add_option("--spec", spec_path, "family spec JSON")->required();
  sweep_cmd->add_option("--out", out_path, "output CSV path (stdout if omitted)");
  sweep_cmd->add_option("--threads", threads, "worker cap (default 1)");
  sweep_cmd->add_flag("--json", as_json, "emit JSON rows instead of CSV");

  auto* env_cmd = app.add_subcommand("envelope", "empirical remainder envelope over families");
  env_cmd->add_option("--spec", spec_path, "family spec JSON")->required();
  env_cmd->add_option("--bins", bins, "t bins (default 12)");
  env_cmd->add_option("--out", out_path, "output path (stdout if omitted)");
  env_cmd->add_option("--threads", threads, "worker cap (default 1)");
  env_cmd->add_flag("--json", as_json, "emit the full JSON estimate instead of CSV bins");

  auto* col_cmd = app.add_subcommand("collapse", "thin-body limit study for (a, 1, c)");
  col_cmd->add_option("--amin", amin, "minor axis grid (default 0.4,0.2,0.1,0.05)")
      ->delimiter(',');
  col_cmd->add_option("--aspect", aspect, "major axis grid (default 1)")->delimiter(',');
  col_cmd->add_option("--level", level, "refinement level; -1 auto (default -1)");
  col_cmd->add_option("--steiner", steiner, "Steiner points per edge (default 3)");
  col_cmd->add_option("--out", out_path, "output CSV path (stdout if omitted)");
  col_cmd->add_option("--threads", threads, "worker cap (default 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(mesh_path, level, steiner, eps, out_path, loop_out);
    if (santalo->parsed()) return cmd_santalo(metric_path, grid_level, n_t, steiner, out_path);
    if (conformal->parsed()) return cmd_conformal(metric_path, grid_level, steiner, out_path);
    if (sweep_cmd->parsed()) return cmd_sweep(spec_path, out_path, threads, as_json);
    if (env_cmd->parsed()) return cmd_envelope(spec_path, bins, out_path, threads, as_json);
    if (col_cmd->parsed()) return cmd_collapse(amin, aspect, level, steiner, out_path, threads);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const AsymmetricMeshError& e) {
    std::cerr << "asymmetric mesh: " << e.what() << "\n";
    return kExitAsymmetric;
  } catch (const EvennessError& e) {
    std::cerr << "odd metric: " << e.what() << "\n";
    return kExitAsymmetric;
  } catch (const DegenerateMassError& e) {
    std::cerr << "degenerate mass: " << e.what() << "\n";
    return kExitAsymmetric;
  } catch (const FlatBodyError& e) {
    std::cerr << "flat body: " << e.what() << "\n";
    return kExitFlat;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitUnexpected;
}
