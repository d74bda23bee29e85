#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pulab/experiments.hpp"
#include "pulab/families.hpp"
#include "pulab/io.hpp"
#include "pulab/version.hpp"

using namespace pulab;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file = "cli_stdout.tmp";
  const std::string cmd = std::string(PULAB_CLI_PATH) + " " + args + " > " + out_file + " 2> cli_stderr.tmp";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.stdout_text = ss.str();
  return r;
}

std::string write_text(const std::string& name, const std::string& text) {
  std::ofstream out(name);
  out << text;
  return name;
}

std::string read_text(const std::string& name) {
  std::ifstream in(name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("analyze: valid sphere mesh reports and exits 0") {
  write_off_file("sphere.off", make_octasphere(2));
  const auto r = run_cli("analyze sphere.off --level 3 --steiner 3 --loop-out loop.obj");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.stdout_text);
  REQUIRE(rep["schema"] == kSchemaVersion);
  REQUIRE(rep["version"] == kVersion);
  REQUIRE(std::abs(rep["deficit"].get<double>()) < 0.05);
  // The OFF file carries the level-2 polyhedron itself (no analytic support),
  // so its radii gap is the honest polyhedral one.
  REQUIRE(rep["t"].get<double>() < 0.05);
  REQUIRE(rep["checks"]["pu"] == true);
  REQUIRE(rep["tolerances"].contains("tau_geo"));
  REQUIRE(rep["params"]["steiner"] == 3);

  const std::string obj = read_text("loop.obj");
  REQUIRE(obj.find("v ") == 0);
  REQUIRE(obj.find("\nl ") != std::string::npos);
}

TEST_CASE("analyze: OFF round-trip preserves coordinates bit-exactly") {
  const auto m = make_random_symmetric_polytope(32, 7);
  write_off_file("poly.off", m);
  const auto back = read_off_file("poly.off");
  REQUIRE(back.num_vertices() == m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) REQUIRE(back.vertices[i] == m.vertices[i]);
}

TEST_CASE("analyze: parse errors exit 3 with a line number") {
  write_text("broken.off", "OFF\n4 4 0\n0 0 z\n");
  const auto r = run_cli("analyze broken.off");
  REQUIRE(r.exit_code == 3);

  write_text("noheader.off", "PLY\n");
  REQUIRE(run_cli("analyze noheader.off").exit_code == 3);
}

TEST_CASE("analyze: asymmetric mesh exits 4, flat mesh exits 5") {
  // A tetrahedron is a valid closed surface but has no antipodal pairing.
  write_text("tetra.off",
             "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n"
             "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n");
  REQUIRE(run_cli("analyze tetra.off").exit_code == 4);

  // Flat doubled square: symmetric, closed, but zero thickness.
  write_text("flat.off",
             "OFF\n4 4 0\n1 1 0\n-1 1 0\n-1 -1 0\n1 -1 0\n"
             "3 0 1 2\n3 0 2 3\n3 0 2 1\n3 0 3 2\n");
  REQUIRE(run_cli("analyze flat.off").exit_code == 5);
}

TEST_CASE("santalo: defaults pass, degenerate metrics exit 4") {
  const auto r = run_cli("santalo --grid-level 3 --nt 128");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.stdout_text);
  REQUIRE(rep["integrands"].size() == 4);
  for (const auto& entry : rep["integrands"]) REQUIRE(entry["ok"] == true);
  REQUIRE(rep["holder_chain"]["holder_ok"] == true);
  REQUIRE(rep["variance"]["ok"] == true);

  write_text("odd.json", R"({"harmonics": [[1, 0, 0.2]]})");
  REQUIRE(run_cli("santalo --metric odd.json --grid-level 3").exit_code == 4);

  write_text("heavy.json", R"({"atoms": [[0, 0, 1, 6.3], [0, 0, -1, -6.3]]})");
  REQUIRE(run_cli("santalo --metric heavy.json --grid-level 3").exit_code == 4);
}

TEST_CASE("conformal: metric report") {
  write_text("m20.json", R"({"harmonics": [[2, 0, 0.2]]})");
  const auto r = run_cli("conformal --metric m20.json --grid-level 3");
  REQUIRE(r.exit_code == 0);
  const json rep = json::parse(r.stdout_text);
  REQUIRE(rep["ok"] == true);
  REQUIRE(rep["deficit"].get<double>() >= rep["bound"].get<double>() - rep["tau"].get<double>());
  REQUIRE(rep["f_min"].get<double>() > 0.0);
}

TEST_CASE("sweep: csv bytes identical across runs and threads") {
  write_text("fam.json", R"({"kind": "ellipsoid", "axes": [[1,1,1],[1,1,2]], "level": 2})");
  REQUIRE(run_cli("sweep --spec fam.json --out s1.csv").exit_code == 0);
  REQUIRE(run_cli("sweep --spec fam.json --out s2.csv --threads 2").exit_code == 0);
  const std::string s1 = read_text("s1.csv");
  REQUIRE(s1 == read_text("s2.csv"));
  REQUIRE(s1.rfind(sweep_csv_header(), 0) == 0);
  REQUIRE(std::count(s1.begin(), s1.end(), '\n') == 3);
}

TEST_CASE("envelope and collapse emit their tables") {
  write_text("fam2.json",
             R"({"families": [{"kind": "ellipsoid", "axes": [[1,1,1],[1,1,2],[1,1,4]], "level": 2}]})");
  const auto env = run_cli("envelope --spec fam2.json --bins 6 --json");
  REQUIRE(env.exit_code == 0);
  const json est = json::parse(env.stdout_text);
  REQUIRE(est["bin_edges"].size() == 6);
  REQUIRE(est["note"].get<std::string>().find("upper bound") != std::string::npos);

  const auto col = run_cli("collapse --amin 0.5,0.25 --level 3");
  REQUIRE(col.exit_code == 0);
  REQUIRE(col.stdout_text.rfind("a,c,sys,W,", 0) == 0);
  REQUIRE(std::count(col.stdout_text.begin(), col.stdout_text.end(), '\n') == 3);
}

TEST_CASE("checked-in defaults file mirrors the compiled defaults") {
  const json j = json::parse(read_text(std::string(PULAB_SOURCE_DIR) + "/share/defaults.json"));
  REQUIRE(j["steiner"] == kDefaults.steiner);
  REQUIRE(j["level"] == kDefaults.level);
  REQUIRE(j["max_auto_level"] == kDefaults.max_auto_level);
  REQUIRE(j["eps"] == kDefaults.eps);
  REQUIRE(j["grid_level"] == kDefaults.grid_level);
  REQUIRE(j["n_t"] == kDefaults.n_t);
  REQUIRE(j["bins"] == kDefaults.bins);
  REQUIRE(j["seed"] == kDefaults.seed);
  REQUIRE(j["threads"] == kDefaults.threads);
  REQUIRE(j["polytope_points"] == kDefaults.polytope_points);
  REQUIRE(j["sandwich_samples"] == kDefaults.sandwich_samples);
  REQUIRE(j["scan_cap"] == kDefaults.scan_cap);
  REQUIRE(j["band_cap"] == kDefaults.band_cap);
}

TEST_CASE("version flag") {
  const auto r = run_cli("--version");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.stdout_text.find(kVersion) != std::string::npos);
}
