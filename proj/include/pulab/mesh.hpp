#pragma once

// Centrally symmetric convex surface meshes: construction by convex hull of a
// symmetrized point set, midpoint refinement, surface area and orthogonal
// shadows. The antipodal vertex pairing is exact by construction (mirror data
// is assigned by negation, never recomputed), which downstream modules rely on
// for exact antipodal equivariance.

#include <algorithm>
#include <array>
#include <cstring>
#include <map>
#include <unordered_map>
#include <utility>

#include "pulab/core.hpp"
#include "pulab/polygon.hpp"

namespace pulab {

using Projector = std::function<Vec3(const Vec3&)>;

struct SymmetricConvexMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW seen from outside
  std::vector<int> antipode;                  // involutive, antipode[i] != i

  // Optional projection onto the analytic support surface (sphere, ellipsoid,
  // ...). Must be odd: support(-x) == -support(x) exactly.
  Projector support;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double bbox_diagonal() const {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& v : vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
  }

  double max_edge_length() const {
    double m = 0.0;
    for (const auto& t : triangles)
      for (int k = 0; k < 3; ++k)
        m = std::max(m, (vertices[t[k]] - vertices[t[(k + 1) % 3]]).norm());
    return m;
  }
};

namespace detail {

// Hash key for exact vertex lookup; -0.0 is canonicalized to +0.0 so that
// negation round-trips.
struct PointKey {
  std::array<std::uint64_t, 3> bits;
  bool operator==(const PointKey&) const = default;
};

inline PointKey point_key(const Vec3& p) {
  PointKey k{};
  for (int i = 0; i < 3; ++i) {
    double x = p[i] == 0.0 ? 0.0 : p[i];
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof(b));
    k.bits[i] = b;
  }
  return k;
}

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto b : k.bits) h = (h ^ b) * 0x100000001b3ULL;
    return h;
  }
};

struct HullFace {
  int a, b, c;
  Vec3 n;    // unit outward normal
  double d;  // plane offset: n.dot(x) == d on the face
};

inline bool lex_less(const Vec3& p, const Vec3& q) {
  if (p.x() != q.x()) return p.x() < q.x();
  if (p.y() != q.y()) return p.y() < q.y();
  return p.z() < q.z();
}

// Incremental convex hull with an absolute coplanarity tolerance. Points are
// inserted by decreasing norm so coarse features appear first. O(n * F).
inline std::vector<HullFace> incremental_hull(const std::vector<Vec3>& pts, double tol) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw FlatBodyError("hull: fewer than 4 points");

  // Initial tetrahedron: spread apart in each dimension.
  int i0 = 0;
  for (int i = 1; i < n; ++i)
    if (lex_less(pts[i], pts[i0])) i0 = i;
  int i1 = -1;
  double best = tol;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  if (i1 < 0) throw FlatBodyError("hull: all points coincide");
  const Vec3 dir = (pts[i1] - pts[i0]).normalized();
  int i2 = -1;
  best = tol;
  for (int i = 0; i < n; ++i) {
    const Vec3 r = pts[i] - pts[i0];
    const double d = (r - r.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0) throw FlatBodyError("hull: points are collinear");
  Vec3 nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  int i3 = -1;
  best = tol;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0) throw FlatBodyError("hull: points are coplanar");

  std::vector<HullFace> faces;
  const Vec3 centroid = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  auto make_face = [&](int a, int b, int c) {
    HullFace f;
    f.a = a;
    f.b = b;
    f.c = c;
    Vec3 normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double len = normal.norm();
    if (len <= 0.0) throw InvariantError("hull: degenerate face");
    normal /= len;
    double d = normal.dot(pts[a]);
    if (normal.dot(centroid) > d) {  // flip to outward
      std::swap(f.b, f.c);
      normal = -normal;
      d = normal.dot(pts[f.a]);
    }
    f.n = normal;
    f.d = d;
    return f;
  };
  faces.push_back(make_face(i0, i1, i2));
  faces.push_back(make_face(i0, i1, i3));
  faces.push_back(make_face(i0, i2, i3));
  faces.push_back(make_face(i1, i2, i3));

  std::vector<int> order;
  order.reserve(n);
  for (int i = 0; i < n; ++i)
    if (i != i0 && i != i1 && i != i2 && i != i3) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double na = pts[a].squaredNorm(), nb = pts[b].squaredNorm();
    if (na != nb) return na > nb;
    return lex_less(pts[a], pts[b]);
  });

  std::vector<char> visible;
  for (const int p : order) {
    visible.assign(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].n.dot(pts[p]) - faces[f].d > tol) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;  // interior (or on the boundary within tol)

    // Horizon: directed edges of visible faces whose undirected edge is not
    // shared with another visible face.
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        edge_count[{std::min(a, b), std::max(a, b)}]++;
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        if (edge_count[{std::min(a, b), std::max(a, b)}] == 1) horizon.emplace_back(a, b);
      }
    }

    std::vector<HullFace> kept;
    kept.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) kept.push_back(faces[f]);
    for (const auto& [a, b] : horizon) kept.push_back(make_face(a, b, p));
    faces.swap(kept);
  }
  return faces;
}

// Union-find.
struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

// Boundary of conv(points U -points) as a symmetric triangulated mesh.
//
// Coplanar hull triangles are merged into facets and re-triangulated one
// antipodal facet orbit at a time (fans cloned through the antipodal map), so
// the triangle set is exactly closed under the antipodal involution even for
// degenerate inputs such as the cube. Non-corner points (facet or edge
// interior within tolerance) are discarded along with interior points.
inline SymmetricConvexMesh build_symmetric_hull(const std::vector<Vec3>& points) {
  if (points.empty()) throw FlatBodyError("build_symmetric_hull: empty input");

  // Symmetrize and dedupe exactly.
  std::vector<Vec3> pts;
  pts.reserve(points.size() * 2);
  std::unordered_map<detail::PointKey, int, detail::PointKeyHash> index;
  auto push = [&](const Vec3& p) {
    const auto key = detail::point_key(p);
    if (index.emplace(key, static_cast<int>(pts.size())).second) pts.push_back(p);
  };
  for (const Vec3& p : points) {
    push(p);
    push(Vec3(-p));
  }

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double tol = kHullTolRel * (hi - lo).norm();
  if (!(tol > 0.0)) throw FlatBodyError("build_symmetric_hull: degenerate extent");

  auto negated = [&](int i) {
    const auto it = index.find(detail::point_key(Vec3(-pts[i])));
    if (it == index.end()) throw InvariantError("symmetrized set lost a negation");
    return it->second;
  };

  const auto faces = detail::incremental_hull(pts, tol);

  // Merge coplanar neighbours into facets: two triangles sharing an edge are
  // coplanar when each opposite vertex sits on the other plane within tol.
  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
    for (int k = 0; k < 3; ++k) {
      const int a = v[k], b = v[(k + 1) % 3];
      edge_faces[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(f));
    }
  }
  detail::DisjointSets ds(static_cast<int>(faces.size()));
  for (const auto& [edge, fs] : edge_faces) {
    if (fs.size() != 2) throw InvariantError("hull surface is not edge-manifold");
    const auto& fa = faces[fs[0]];
    const auto& fb = faces[fs[1]];
    auto opposite = [&](const detail::HullFace& f) {
      for (const int w : {f.a, f.b, f.c})
        if (w != edge.first && w != edge.second) return w;
      throw InvariantError("hull face without opposite vertex");
    };
    const double da = std::abs(fa.n.dot(pts[opposite(fb)]) - fa.d);
    const double db = std::abs(fb.n.dot(pts[opposite(fa)]) - fb.d);
    if (da <= tol && db <= tol) ds.unite(fs[0], fs[1]);
  }

  std::map<int, std::vector<int>> components;
  for (std::size_t f = 0; f < faces.size(); ++f)
    components[ds.find(static_cast<int>(f))].push_back(static_cast<int>(f));

  // Facet boundary cycle (CCW from outside), then corners only.
  struct Facet {
    std::vector<int> corners;  // CCW cycle
  };
  std::vector<Facet> facets;
  for (const auto& [root, fs] : components) {
    std::map<std::pair<int, int>, int> inner;  // undirected edge -> multiplicity
    for (const int f : fs) {
      const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        inner[{std::min(a, b), std::max(a, b)}]++;
      }
    }
    std::map<int, int> succ;  // directed boundary edges
    for (const int f : fs) {
      const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        if (inner[{std::min(a, b), std::max(a, b)}] == 1) {
          if (succ.count(a)) throw InvariantError("facet boundary is not a simple cycle");
          succ[a] = b;
        }
      }
    }
    if (succ.empty()) throw InvariantError("facet without boundary");
    std::vector<int> cycle;
    const int start = succ.begin()->first;
    int cur = start;
    do {
      cycle.push_back(cur);
      const auto it = succ.find(cur);
      if (it == succ.end()) throw InvariantError("open facet boundary");
      cur = it->second;
    } while (cur != start && cycle.size() <= succ.size());
    if (cur != start) throw InvariantError("facet boundary failed to close");

    Facet facet;
    const int m = static_cast<int>(cycle.size());
    for (int k = 0; k < m; ++k) {
      const Vec3& prev = pts[cycle[(k + m - 1) % m]];
      const Vec3& here = pts[cycle[k]];
      const Vec3& next = pts[cycle[(k + 1) % m]];
      const Vec3 chord = next - prev;
      const double len = chord.norm();
      const double dist = len > 0.0 ? chord.cross(here - prev).norm() / len : 0.0;
      if (dist > tol) facet.corners.push_back(cycle[k]);
    }
    if (facet.corners.size() < 3) throw InvariantError("facet with fewer than 3 corners");
    facets.push_back(std::move(facet));
  }

  // Pair facets with their antipodal images and fan-triangulate one
  // representative per orbit; the partner gets the mirrored fan.
  auto facet_key = [&](const Facet& f) {
    std::vector<int> k = f.corners;
    std::sort(k.begin(), k.end());
    return k;
  };
  std::map<std::vector<int>, int> facet_by_key;
  for (std::size_t i = 0; i < facets.size(); ++i) facet_by_key[facet_key(facets[i])] = static_cast<int>(i);

  std::vector<std::array<int, 3>> tris;  // indices into pts
  std::vector<char> done(facets.size(), 0);
  for (std::size_t i = 0; i < facets.size(); ++i) {
    if (done[i]) continue;
    std::vector<int> mirror_key;
    for (const int c : facets[i].corners) mirror_key.push_back(negated(c));
    std::sort(mirror_key.begin(), mirror_key.end());
    const auto it = facet_by_key.find(mirror_key);
    if (it == facet_by_key.end())
      throw AsymmetricMeshError("hull facets are not antipodally paired (degenerate input)");
    const int j = it->second;
    if (static_cast<std::size_t>(j) == i)
      throw InvariantError("facet is its own antipodal image");
    done[i] = done[j] = 1;

    // Rotate the representative cycle to start at its smallest corner id.
    std::vector<int> cyc = facets[i].corners;
    const auto mn = std::min_element(cyc.begin(), cyc.end());
    std::rotate(cyc.begin(), mn, cyc.end());
    for (std::size_t k = 1; k + 1 < cyc.size(); ++k) {
      tris.push_back({cyc[0], cyc[k], cyc[k + 1]});
      // Mirrored triangle, orientation reversed to stay outward.
      tris.push_back({negated(cyc[0]), negated(cyc[k + 1]), negated(cyc[k])});
    }
  }

  // Compact to the retained corner set, ordered lexicographically.
  std::vector<int> used;
  {
    std::vector<char> mark(pts.size(), 0);
    for (const auto& t : tris)
      for (const int v : t) mark[v] = 1;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (mark[i]) used.push_back(static_cast<int>(i));
  }
  std::sort(used.begin(), used.end(), [&](int a, int b) { return detail::lex_less(pts[a], pts[b]); });
  std::vector<int> remap(pts.size(), -1);
  for (std::size_t i = 0; i < used.size(); ++i) remap[used[i]] = static_cast<int>(i);

  SymmetricConvexMesh mesh;
  mesh.vertices.reserve(used.size());
  for (const int u : used) mesh.vertices.push_back(pts[u]);
  mesh.triangles.reserve(tris.size());
  for (const auto& t : tris) mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  mesh.antipode.resize(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    const int partner = remap[negated(used[i])];
    if (partner < 0 || partner == static_cast<int>(i))
      throw AsymmetricMeshError("retained vertex lost its antipode");
    mesh.antipode[i] = partner;
  }
  return mesh;
}

inline double mesh_area(const SymmetricConvexMesh& m) {
  double area = 0.0;
  for (const auto& t : m.triangles) {
    const Vec3& a = m.vertices[t[0]];
    area += 0.5 * (m.vertices[t[1]] - a).cross(m.vertices[t[2]] - a).norm();
  }
  return area;
}

// Canonical undirected edges (lo < hi), sorted.
inline std::vector<std::pair<int, int>> mesh_edges(const SymmetricConvexMesh& m) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m.triangles.size() * 3 / 2);
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (a < b) edges.emplace_back(a, b);
    }
  std::sort(edges.begin(), edges.end());
  // Every edge must appear exactly twice across triangles, once per direction;
  // the a < b filter keeps exactly one copy.
  return edges;
}

// One level of 1-to-4 midpoint subdivision. New vertices go to edge midpoints,
// then through the support projector when present. Midpoints of antipodal
// edges are exact negations of each other (IEEE addition and halving are
// sign-symmetric; projectors are required to be odd), so the refined mesh is
// exactly symmetric. Vertex indices of the input mesh are preserved.
inline SymmetricConvexMesh refine_once(const SymmetricConvexMesh& m) {
  SymmetricConvexMesh out;
  out.vertices = m.vertices;
  out.antipode = m.antipode;
  out.support = m.support;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid_id = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec3 p = (m.vertices[key.first] + m.vertices[key.second]) / 2.0;
    if (m.support) p = m.support(p);
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    out.antipode.push_back(-1);
    midpoint.emplace(key, id);
    return id;
  };

  out.triangles.reserve(m.triangles.size() * 4);
  for (const auto& t : m.triangles) {
    const int ab = mid_id(t[0], t[1]);
    const int bc = mid_id(t[1], t[2]);
    const int ca = mid_id(t[2], t[0]);
    out.triangles.push_back({t[0], ab, ca});
    out.triangles.push_back({t[1], bc, ab});
    out.triangles.push_back({t[2], ca, bc});
    out.triangles.push_back({ab, bc, ca});
  }

  for (const auto& [edge, id] : midpoint) {
    const auto mirror = std::make_pair(std::min(m.antipode[edge.first], m.antipode[edge.second]),
                                       std::max(m.antipode[edge.first], m.antipode[edge.second]));
    const auto it = midpoint.find(mirror);
    if (it == midpoint.end()) throw AsymmetricMeshError("refine: antipodal edge missing");
    out.antipode[id] = it->second;
    if (out.vertices[id] != -out.vertices[it->second])
      throw AsymmetricMeshError("refine: projector is not odd");
  }
  return out;
}

inline SymmetricConvexMesh refine(const SymmetricConvexMesh& m, int level) {
  SymmetricConvexMesh out = m;
  for (int i = 0; i < level; ++i) out = refine_once(out);
  return out;
}

// Orthogonal shadow: convex hull of the vertex projection onto the plane
// orthogonal to `normal`.
inline PlanarConvexBody project_shadow(const SymmetricConvexMesh& m, const Vec3& normal) {
  if (normal.norm() <= 0.0) throw InvariantError("project_shadow: zero normal");
  Vec3 u, v;
  plane_basis(normal.normalized(), u, v);
  std::vector<Vec2> pts;
  pts.reserve(m.vertices.size());
  for (const Vec3& p : m.vertices) pts.emplace_back(u.dot(p), v.dot(p));
  return PlanarConvexBody{convex_hull_2d(pts)};
}

// Structural validation. Throws on the first violated invariant.
inline void validate_mesh(const SymmetricConvexMesh& m, int convexity_sample = 4096) {
  const int nv = m.num_vertices();
  if (nv < 4 || m.triangles.empty()) throw InvariantError("mesh: too small");
  if (static_cast<int>(m.antipode.size()) != nv) throw InvariantError("mesh: antipode size");
  for (int i = 0; i < nv; ++i) {
    const int j = m.antipode[i];
    if (j < 0 || j >= nv || j == i) throw AsymmetricMeshError("mesh: antipode out of range or fixed");
    if (m.antipode[j] != i) throw AsymmetricMeshError("mesh: antipode is not an involution");
    if (m.vertices[j] != -m.vertices[i]) throw AsymmetricMeshError("mesh: antipode is not exact negation");
  }

  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : m.triangles) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) throw InvariantError("mesh: degenerate triangle");
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (a < 0 || a >= nv) throw InvariantError("mesh: vertex index out of range");
      if (++directed[{a, b}] > 1) throw InvariantError("mesh: directed edge reused");
    }
  }
  int undirected = 0;
  for (const auto& [e, c] : directed) {
    if (e.first < e.second) {
      ++undirected;
      if (!directed.count({e.second, e.first})) throw InvariantError("mesh: boundary edge");
    }
  }
  const int euler = nv - undirected + m.num_triangles();
  if (euler != 2) throw InvariantError("mesh: Euler characteristic is " + std::to_string(euler));

  // Convex position: every vertex on (never strictly inside) the hull of the
  // vertex set, checked against the mesh's own face planes. For large meshes
  // a deterministic vertex sample is checked.
  const double tol = 16.0 * kHullTolRel * m.bbox_diagonal();
  std::vector<Vec3> normals(m.num_triangles());
  std::vector<double> offsets(m.num_triangles());
  for (int f = 0; f < m.num_triangles(); ++f) {
    const auto& t = m.triangles[f];
    const Vec3& a = m.vertices[t[0]];
    Vec3 n = (m.vertices[t[1]] - a).cross(m.vertices[t[2]] - a);
    const double len = n.norm();
    if (len <= 0.0) throw InvariantError("mesh: zero-area triangle");
    n /= len;
    if (n.dot(a) < 0.0) throw InvariantError("mesh: inward-oriented triangle");
    normals[f] = n;
    offsets[f] = n.dot(a);
  }
  const int step = std::max(1, nv / std::max(1, convexity_sample));
  for (int i = 0; i < nv; i += step) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int f = 0; f < m.num_triangles(); ++f)
      worst = std::max(worst, normals[f].dot(m.vertices[i]) - offsets[f]);
    if (std::abs(worst) > tol)
      throw InvariantError("mesh: vertex off the hull boundary by " + std::to_string(worst));
  }
}

}  // namespace pulab
