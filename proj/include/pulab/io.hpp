#pragma once

// File formats: OFF meshes (ASCII, 17 significant digits), planar bodies and
// conformal metrics as JSON, report serialization.

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "pulab/conformal.hpp"
#include "pulab/geodesic.hpp"
#include "pulab/polygon.hpp"
#include "pulab/version.hpp"

namespace pulab {

using nlohmann::json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

// Line-oriented token reader that tracks line numbers for error reporting.
class LineTokens {
 public:
  explicit LineTokens(std::istream& in) : in_(in) {}

  // Next non-comment, non-empty line split into tokens.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream iss(line);
      tokens.assign(std::istream_iterator<std::string>(iss), std::istream_iterator<std::string>());
      if (!tokens.empty()) return true;
    }
    return false;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

inline double parse_double(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("trailing characters in number '" + tok + "'", line);
  return v;
}

inline long parse_int(const std::string& tok, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("trailing characters in integer '" + tok + "'", line);
  return v;
}

}  // namespace detail

// OFF reader. The vertex set must be centrally symmetric: vertices are paired
// exactly when possible, otherwise within tau of exact negation, in which
// case the later vertex of the pair is snapped to the exact negation.
inline SymmetricConvexMesh read_off(std::istream& in) {
  detail::LineTokens reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok)) throw ParseError("empty file", reader.line());
  if (tok.size() != 1 || tok[0] != "OFF") throw ParseError("expected OFF header", reader.line());
  if (!reader.next(tok)) throw ParseError("missing counts line", reader.line());
  if (tok.size() != 3) throw ParseError("counts line must be 'V F E'", reader.line());
  const long nv = detail::parse_int(tok[0], reader.line());
  const long nf = detail::parse_int(tok[1], reader.line());
  if (nv < 4 || nf < 4) throw ParseError("too few vertices or faces", reader.line());

  SymmetricConvexMesh m;
  m.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!reader.next(tok)) throw ParseError("unexpected end of file in vertex list", reader.line());
    if (tok.size() != 3) throw ParseError("vertex line must have 3 coordinates", reader.line());
    m.vertices.emplace_back(detail::parse_double(tok[0], reader.line()),
                            detail::parse_double(tok[1], reader.line()),
                            detail::parse_double(tok[2], reader.line()));
  }
  m.triangles.reserve(nf);
  for (long i = 0; i < nf; ++i) {
    if (!reader.next(tok)) throw ParseError("unexpected end of file in face list", reader.line());
    if (tok.empty() || detail::parse_int(tok[0], reader.line()) != 3 || tok.size() != 4)
      throw ParseError("only triangular faces are supported", reader.line());
    std::array<int, 3> t;
    for (int k = 0; k < 3; ++k) {
      const long v = detail::parse_int(tok[k + 1], reader.line());
      if (v < 0 || v >= nv) throw ParseError("face index out of range", reader.line());
      t[k] = static_cast<int>(v);
    }
    m.triangles.push_back(t);
  }

  // Antipode pairing: exact match first, tau-snap second.
  const double tau = kHullTolRel * m.bbox_diagonal();
  const int n = m.num_vertices();
  m.antipode.assign(n, -1);
  std::unordered_map<detail::PointKey, int, detail::PointKeyHash> index;
  for (int i = 0; i < n; ++i)
    if (!index.emplace(detail::point_key(m.vertices[i]), i).second)
      throw ParseError("duplicate vertex " + std::to_string(i), 0);
  for (int i = 0; i < n; ++i) {
    if (m.antipode[i] >= 0) continue;
    const auto it = index.find(detail::point_key(Vec3(-m.vertices[i])));
    int j = it != index.end() ? it->second : -1;
    if (j < 0 || m.antipode[j] >= 0) {
      j = -1;
      double best = tau;
      for (int k = 0; k < n; ++k) {
        if (k == i || m.antipode[k] >= 0) continue;
        const double d = (m.vertices[k] + m.vertices[i]).norm();
        if (d <= best) {
          best = d;
          j = k;
        }
      }
      if (j >= 0) m.vertices[j] = -m.vertices[i];  // snap to the exact negation
    }
    if (j < 0 || j == i)
      throw AsymmetricMeshError("vertex " + std::to_string(i) + " has no antipodal partner");
    m.antipode[i] = j;
    m.antipode[j] = i;
  }
  return m;
}

inline SymmetricConvexMesh read_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_off(in);
}

inline void write_off(std::ostream& out, const SymmetricConvexMesh& m) {
  out << "OFF\n" << m.num_vertices() << ' ' << m.num_triangles() << " 0\n";
  for (const Vec3& v : m.vertices)
    out << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z())
        << '\n';
  for (const auto& t : m.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

inline void write_off_file(const std::string& path, const SymmetricConvexMesh& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_off(out, m);
}

// Planar bodies: JSON array of [x, y] pairs, CCW.
inline json polygon_to_json(const PlanarConvexBody& b) {
  json arr = json::array();
  for (const Vec2& p : b.boundary) arr.push_back({p.x(), p.y()});
  return arr;
}

inline PlanarConvexBody polygon_from_json(const json& j) {
  if (!j.is_array() || j.size() < 3) throw ParseError("polygon: expected an array of points", 0);
  PlanarConvexBody b;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ParseError("polygon: points must be [x, y]", 0);
    b.boundary.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return b;
}

// Conformal metric specification:
//   {"harmonics": [[l, m, coeff], ...]}  for u with f = e^u, or
//   {"atoms": [[x, y, z, mass], ...]}    for Green-potential cone metrics, or
//   {"constant": c}.
inline ConformalMetric metric_from_json(const json& j) {
  if (j.contains("harmonics")) {
    std::vector<std::tuple<int, int, double>> terms;
    for (const auto& t : j["harmonics"]) {
      if (!t.is_array() || t.size() != 3) throw ParseError("harmonics entries are [l, m, coeff]", 0);
      terms.emplace_back(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
    }
    return conformal_from_harmonics(terms);
  }
  if (j.contains("atoms")) {
    RadonMassSpec spec;
    for (const auto& a : j["atoms"]) {
      if (!a.is_array() || a.size() != 4) throw ParseError("atom entries are [x, y, z, mass]", 0);
      spec.atoms.emplace_back(Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>()),
                              a[3].get<double>());
    }
    return conformal_from_atoms(spec);
  }
  if (j.contains("constant")) return conformal_constant(j["constant"].get<double>());
  throw ParseError("metric: expected 'harmonics', 'atoms' or 'constant'", 0);
}

inline json ellipsoid_to_json(const Ellipsoid& e) {
  json frame = json::array();
  for (int r = 0; r < 3; ++r) frame.push_back({e.frame(r, 0), e.frame(r, 1), e.frame(r, 2)});
  return {{"semi_axes", {e.semi_axes[0], e.semi_axes[1], e.semi_axes[2]}}, {"frame", frame}};
}

inline json radii_report_to_json(const RadiiReport& rep) {
  return {{"R", rep.R}, {"r", rep.r}, {"gap", rep.gap}, {"john", ellipsoid_to_json(rep.john)}};
}

inline json pu_report_to_json(const PuReport& rep) {
  return {
      {"schema", kSchemaVersion},
      {"version", kVersion},
      {"sys", rep.sys},
      {"area", rep.area},
      {"R", rep.R},
      {"r", rep.r},
      {"deficit", rep.deficit},
      {"t", rep.t},
      {"L", rep.L},
      {"D", rep.D},
      {"diam", rep.diam},
      {"john", ellipsoid_to_json(rep.john)},
      {"mvee_axes", {rep.mvee_axes[0], rep.mvee_axes[1], rep.mvee_axes[2]}},
      {"checks",
       {{"loop_length", rep.checks.loop_length_ok},
        {"inradius_bound", rep.checks.inradius_bound_ok},
        {"circumradius_bound", rep.checks.circum_bound_ok},
        {"diameter_bound", rep.checks.diameter_bound_ok},
        {"pu", rep.checks.pu_ok},
        {"sandwich", rep.checks.sandwich_ok}}},
      {"sandwich",
       {{"outer_margin", rep.sandwich.outer_margin},
        {"inner_margin", rep.sandwich.inner_margin},
        {"samples", rep.sandwich.samples}}},
      {"tolerances", {{"tau_geo", rep.tau_geo}, {"tau_pu", rep.tau_pu}}},
      {"params",
       {{"level", rep.level},
        {"steiner", rep.steiner},
        {"vertices", rep.vertices},
        {"faces", rep.faces},
        {"max_edge", rep.max_edge}}},
  };
}

// Systolic loop as an OBJ polyline.
inline void write_loop_obj(std::ostream& out, const std::vector<Vec3>& pts) {
  for (const Vec3& p : pts)
    out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << '\n';
  out << "l";
  for (std::size_t i = 1; i <= pts.size(); ++i) out << ' ' << i;
  out << " 1\n";
}

}  // namespace pulab
