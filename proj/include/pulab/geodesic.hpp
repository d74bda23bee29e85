#pragma once

// Intrinsic metric approximation on the convex surface: a Steiner-point graph
// whose shortest-path metric over-approximates the polyhedral geodesic
// metric, plus the systole of the RP^2 quotient (minimal antipodal distance),
// systolic loop extraction, distances to the loop and the intrinsic diameter.
//
// All mirrored graph data (Steiner positions, edge weights) is cloned through
// the antipodal involution rather than recomputed, so the involution is a
// weight-preserving graph automorphism exactly and d(x, y) == d(Ax, Ay)
// bitwise.

#include <queue>

#include "pulab/core.hpp"
#include "pulab/mesh.hpp"
#include "pulab/radii.hpp"

namespace pulab {

struct GeodesicGraph {
  std::vector<Vec3> pos;
  std::vector<int> node_antipode;
  int num_vertex_nodes = 0;  // nodes [0, V) are mesh vertices

  std::vector<int> head;  // CSR offsets, size n + 1
  std::vector<int> adj;
  std::vector<double> weight;
  double max_edge = 0.0;

  int num_nodes() const { return static_cast<int>(pos.size()); }
  int degree(int u) const { return head[u + 1] - head[u]; }
};

namespace detail {

struct EdgeRef {
  int lo, hi;      // lo < hi
  int tri[2];      // adjacent triangles
  int apex[2];     // opposite vertex in tri[k]
};

inline int find_edge(const std::vector<std::pair<int, int>>& edges, int a, int b) {
  const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) throw InvariantError("graph: edge lookup failed");
  return static_cast<int>(it - edges.begin());
}

}  // namespace detail

// Graph nodes: mesh vertices plus `steiner` evenly spaced points per edge.
// Edges: consecutive chains along each mesh edge, chords between boundary
// nodes of each triangle (different sides only; same-side chords are covered
// exactly by the chains), and cross-triangle chords between nodes of adjacent
// triangles whose unfolded straight segment crosses the shared edge. With
// steiner == 0 the graph is exactly the mesh 1-skeleton.
inline GeodesicGraph build_graph(const SymmetricConvexMesh& m, int steiner) {
  if (steiner < 0) throw InvariantError("build_graph: steiner must be >= 0");
  const int V = m.num_vertices();
  const int s = steiner;
  const auto edges = mesh_edges(m);
  const int E = static_cast<int>(edges.size());

  std::vector<detail::EdgeRef> eref(E);
  for (int e = 0; e < E; ++e) {
    eref[e].lo = edges[e].first;
    eref[e].hi = edges[e].second;
    eref[e].tri[0] = eref[e].tri[1] = -1;
  }
  for (int f = 0; f < m.num_triangles(); ++f) {
    const auto& t = m.triangles[f];
    for (int k = 0; k < 3; ++k) {
      const int e = detail::find_edge(edges, t[k], t[(k + 1) % 3]);
      const int slot = eref[e].tri[0] < 0 ? 0 : 1;
      if (slot == 1 && eref[e].tri[1] >= 0) throw InvariantError("build_graph: non-manifold edge");
      eref[e].tri[slot] = f;
      eref[e].apex[slot] = t[(k + 2) % 3];
    }
  }
  for (const auto& er : eref)
    if (er.tri[0] < 0 || er.tri[1] < 0) throw InvariantError("build_graph: boundary edge");

  GeodesicGraph g;
  g.num_vertex_nodes = V;
  const int n = V + E * s;
  g.pos.resize(n);
  g.node_antipode.assign(n, -1);
  for (int i = 0; i < V; ++i) {
    g.pos[i] = m.vertices[i];
    g.node_antipode[i] = m.antipode[i];
  }

  auto steiner_id = [&](int e, int k) { return V + e * s + (k - 1); };  // k in 1..s

  std::vector<int> edge_antipode(E);
  for (int e = 0; e < E; ++e)
    edge_antipode[e] = detail::find_edge(edges, m.antipode[eref[e].lo], m.antipode[eref[e].hi]);

  // Steiner positions, one edge orbit at a time; the mirror edge receives the
  // exact negations.
  for (int e = 0; e < E; ++e) {
    const int e2 = edge_antipode[e];
    if (e2 == e) throw InvariantError("build_graph: edge joins antipodal vertices");
    if (e2 < e) continue;
    const Vec3& a = m.vertices[eref[e].lo];
    const Vec3& b = m.vertices[eref[e].hi];
    const bool aligned = m.antipode[eref[e].lo] == eref[e2].lo;
    for (int k = 1; k <= s; ++k) {
      const double t = static_cast<double>(k) / (s + 1);
      const Vec3 p = a + (b - a) * t;
      const int id = steiner_id(e, k);
      const int id2 = steiner_id(e2, aligned ? k : s + 1 - k);
      g.pos[id] = p;
      g.pos[id2] = -p;
      g.node_antipode[id] = id2;
      g.node_antipode[id2] = id;
    }
  }

  std::vector<std::tuple<int, int, double>> arcs;
  arcs.reserve(static_cast<std::size_t>(E) * (s + 1) + m.num_triangles() * (3 * s * s + 3 * s) +
               static_cast<std::size_t>(E) * (2 * s + 1) * (2 * s + 1));
  auto add_arc_pair = [&](int u, int v, double w) {
    arcs.emplace_back(u, v, w);
    arcs.emplace_back(g.node_antipode[u], g.node_antipode[v], w);
    g.max_edge = std::max(g.max_edge, w);
  };

  auto side_nodes = [&](int e) {
    std::vector<int> nodes;
    nodes.reserve(s);
    for (int k = 1; k <= s; ++k) nodes.push_back(steiner_id(e, k));
    return nodes;
  };

  // Chains along mesh edges.
  for (int e = 0; e < E; ++e) {
    if (edge_antipode[e] < e) continue;
    std::vector<int> chain = {eref[e].lo};
    for (const int id : side_nodes(e)) chain.push_back(id);
    chain.push_back(eref[e].hi);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      add_arc_pair(chain[i], chain[i + 1], (g.pos[chain[i]] - g.pos[chain[i + 1]]).norm());
  }

  // Per-triangle chords, one triangle orbit at a time.
  std::map<std::array<int, 3>, int> tri_index;
  for (int f = 0; f < m.num_triangles(); ++f) {
    std::array<int, 3> key = m.triangles[f];
    std::sort(key.begin(), key.end());
    tri_index[key] = f;
  }
  auto tri_antipode = [&](int f) {
    std::array<int, 3> key = {m.antipode[m.triangles[f][0]], m.antipode[m.triangles[f][1]],
                              m.antipode[m.triangles[f][2]]};
    std::sort(key.begin(), key.end());
    const auto it = tri_index.find(key);
    if (it == tri_index.end()) throw AsymmetricMeshError("build_graph: triangulation not antipodal");
    return it->second;
  };

  if (s > 0) {
    for (int f = 0; f < m.num_triangles(); ++f) {
      if (tri_antipode(f) < f) continue;
      const auto& t = m.triangles[f];
      int side[3];
      for (int k = 0; k < 3; ++k) side[k] = detail::find_edge(edges, t[k], t[(k + 1) % 3]);
      for (int k = 0; k < 3; ++k) {
        // Vertex t[k] to the Steiner nodes of the opposite side.
        for (const int v : side_nodes(side[(k + 1) % 3]))
          add_arc_pair(t[k], v, (g.pos[t[k]] - g.pos[v]).norm());
        // Steiner-to-Steiner chords between distinct sides.
        for (const int u : side_nodes(side[k]))
          for (const int v : side_nodes(side[(k + 1) % 3]))
            add_arc_pair(u, v, (g.pos[u] - g.pos[v]).norm());
      }
    }

    // Cross-triangle chords via unfolding, one edge orbit at a time.
    for (int e = 0; e < E; ++e) {
      if (edge_antipode[e] < e) continue;
      const Vec3& P = m.vertices[eref[e].lo];
      const Vec3& Q = m.vertices[eref[e].hi];
      const Vec3 axis = Q - P;
      const double len = axis.norm();
      const Vec3 X = axis / len;

      std::array<std::vector<int>, 2> wing;
      for (int w = 0; w < 2; ++w) {
        const auto& t = m.triangles[eref[e].tri[w]];
        wing[w].push_back(eref[e].apex[w]);
        for (int k = 0; k < 3; ++k) {
          const int ee = detail::find_edge(edges, t[k], t[(k + 1) % 3]);
          if (ee == e) continue;
          for (const int id : side_nodes(ee)) wing[w].push_back(id);
        }
      }
      auto unfold = [&](int node, double sign, double& x, double& y) {
        const Vec3 r = g.pos[node] - P;
        x = r.dot(X);
        y = sign * (r - x * X).norm();
      };
      for (const int u : wing[0])
        for (const int v : wing[1]) {
          double xu, yu, xv, yv;
          unfold(u, 1.0, xu, yu);
          unfold(v, -1.0, xv, yv);
          if (!(yu > 0.0) || !(yv < 0.0)) continue;
          const double xc = xu + (xv - xu) * (yu / (yu - yv));
          if (xc <= 0.0 || xc >= len) continue;  // leaves through a vertex; other arcs cover
          add_arc_pair(u, v, std::hypot(xu - xv, yu - yv));
        }
    }
  }

  // CSR, both directions.
  g.head.assign(n + 1, 0);
  for (const auto& [u, v, w] : arcs) {
    g.head[u + 1]++;
    g.head[v + 1]++;
  }
  for (int i = 0; i < n; ++i) g.head[i + 1] += g.head[i];
  g.adj.resize(arcs.size() * 2);
  g.weight.resize(arcs.size() * 2);
  std::vector<int> cursor(g.head.begin(), g.head.end() - 1);
  for (const auto& [u, v, w] : arcs) {
    g.adj[cursor[u]] = v;
    g.weight[cursor[u]++] = w;
    g.adj[cursor[v]] = u;
    g.weight[cursor[v]++] = w;
  }
  return g;
}

// tau_geo: path-discretization error budget of the graph metric.
inline double tau_geo(const GeodesicGraph& g) { return 3.0 * g.max_edge; }

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<int> parent;
};

// Multi-source Dijkstra. Stops early once `target` is settled or the frontier
// exceeds `prune` (remaining distances are then left at +inf).
inline ShortestPaths distance_field(const GeodesicGraph& g, const std::vector<int>& sources,
                                    int target = -1,
                                    double prune = std::numeric_limits<double>::infinity(),
                                    bool want_parents = false) {
  if (sources.empty()) throw InvariantError("distance_field: no sources");
  const int n = g.num_nodes();
  ShortestPaths sp;
  sp.dist.assign(n, std::numeric_limits<double>::infinity());
  if (want_parents) sp.parent.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (const int src : sources) {
    sp.dist[src] = 0.0;
    pq.push({0.0, src});
  }
  std::vector<char> settled(n, 0);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (settled[u]) continue;
    if (d > prune) break;
    settled[u] = 1;
    if (u == target) break;
    for (int k = g.head[u]; k < g.head[u + 1]; ++k) {
      const int v = g.adj[k];
      const double nd = d + g.weight[k];
      if (nd < sp.dist[v]) {
        sp.dist[v] = nd;
        if (want_parents) sp.parent[v] = u;
        pq.push({nd, v});
      }
    }
  }
  return sp;
}

struct SystoleResult {
  double sys = std::numeric_limits<double>::infinity();
  int witness = -1;
  std::vector<double> seed_values;  // antipodal distance per seed (inf if pruned)
};

// Minimal antipodal distance over the given seed nodes. Each evaluation is a
// target Dijkstra pruned at the best value so far; ties resolve to the lowest
// node index because seeds are scanned in ascending order.
inline SystoleResult systole_scan(const GeodesicGraph& g, std::vector<int> seeds,
                                  double keep_above_best = 0.0) {
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  SystoleResult res;
  res.seed_values.reserve(seeds.size());
  for (const int seed : seeds) {
    const int target = g.node_antipode[seed];
    const auto sp = distance_field(g, {seed}, target, res.sys + keep_above_best);
    const double d = sp.dist[target];
    res.seed_values.push_back(d);
    if (d < res.sys) {
      res.sys = d;
      res.witness = seed;
    }
  }
  if (res.witness < 0) throw InvariantError("systole_scan: no antipodal distance found");
  return res;
}

// Deterministic farthest-point subsample of the vertex nodes (Euclidean).
inline std::vector<int> farthest_point_seeds(const GeodesicGraph& g, int count) {
  const int V = g.num_vertex_nodes;
  std::vector<int> seeds = {0};
  std::vector<double> best(V, std::numeric_limits<double>::infinity());
  while (static_cast<int>(seeds.size()) < std::min(count, V)) {
    const int last = seeds.back();
    int arg = -1;
    double far = -1.0;
    for (int i = 0; i < V; ++i) {
      best[i] = std::min(best[i], (g.pos[i] - g.pos[last]).squaredNorm());
      if (best[i] > far) {
        far = best[i];
        arg = i;
      }
    }
    if (arg < 0 || far <= 0.0) break;
    seeds.push_back(arg);
  }
  return seeds;
}

// Quotient systole: min over nodes of d(x, antipode(x)). The scan runs over
// the mesh-vertex nodes (a Steiner node is within one edge of a vertex, so
// the restriction is covered by the tau_geo budget); very large graphs fall
// back to a deterministic farthest-point subsample.
inline SystoleResult systole(const GeodesicGraph& g, int seed_cap = 4096) {
  std::vector<int> seeds;
  if (g.num_vertex_nodes <= seed_cap) {
    seeds.resize(g.num_vertex_nodes);
    for (int i = 0; i < g.num_vertex_nodes; ++i) seeds[i] = i;
  } else {
    seeds = farthest_point_seeds(g, seed_cap / 4);
  }
  return systole_scan(g, std::move(seeds));
}

// Closed antipodally-invariant loop through the witness: the shortest
// witness -> antipode path joined with its own antipodal image. The length is
// 2 * sys by the exact weight-preserving automorphism.
inline std::vector<int> systolic_loop(const GeodesicGraph& g, int witness) {
  const int target = g.node_antipode[witness];
  const auto sp = distance_field(g, {witness}, target,
                                 std::numeric_limits<double>::infinity(), true);
  if (!std::isfinite(sp.dist[target])) throw InvariantError("systolic_loop: target unreachable");
  std::vector<int> path;
  for (int u = target; u != -1; u = sp.parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());  // witness ... antipode(witness)
  std::vector<int> loop = path;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) loop.push_back(g.node_antipode[path[i]]);
  return loop;
}

inline double loop_length(const GeodesicGraph& g, const std::vector<int>& loop) {
  double len = 0.0;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) {
    const int u = loop[i], v = loop[(i + 1) % n];
    double w = -1.0;
    for (int k = g.head[u]; k < g.head[u + 1]; ++k)
      if (g.adj[k] == v) {
        w = w < 0.0 ? g.weight[k] : std::min(w, g.weight[k]);
      }
    if (w < 0.0) throw InvariantError("loop_length: consecutive loop nodes not adjacent");
    len += w;
  }
  return len;
}

inline double max_distance_to_loop(const GeodesicGraph& g, const std::vector<int>& loop) {
  const auto sp = distance_field(g, loop);
  double d = 0.0;
  for (const double x : sp.dist) {
    if (!std::isfinite(x)) throw InvariantError("max_distance_to_loop: graph disconnected");
    d = std::max(d, x);
  }
  return d;
}

// Certified lower bound on the graph diameter: exhaustive for small graphs,
// otherwise farthest-point eccentricity sweeps seeded at the outermost vertex
// (whose eccentricity already dominates 2R via the antipodal chord).
inline double intrinsic_diameter(const GeodesicGraph& g, int sample = 6,
                                 int exhaustive_cap = 1500) {
  if (sample < 1) throw InvariantError("intrinsic_diameter: sample must be >= 1");
  const int n = g.num_nodes();
  auto eccentricity = [&](int src, int& far_node) {
    const auto sp = distance_field(g, {src});
    double e = 0.0;
    far_node = src;
    for (int i = 0; i < n; ++i)
      if (sp.dist[i] > e && std::isfinite(sp.dist[i])) {
        e = sp.dist[i];
        far_node = i;
      }
    return e;
  };
  if (n <= exhaustive_cap) {
    double diam = 0.0;
    int dummy;
    for (int i = 0; i < n; ++i) diam = std::max(diam, eccentricity(i, dummy));
    return diam;
  }
  int src = 0;
  double far = -1.0;
  for (int i = 0; i < g.num_vertex_nodes; ++i)
    if (g.pos[i].squaredNorm() > far) {
      far = g.pos[i].squaredNorm();
      src = i;
    }
  double diam = 0.0;
  for (int it = 0; it < sample; ++it) {
    int next;
    diam = std::max(diam, eccentricity(src, next));
    if (next == src) break;
    src = next;
  }
  return diam;
}

struct GeodesicChecks {
  bool loop_length_ok = false;      // L == 2 sys (construction)
  bool inradius_bound_ok = false;   // 2 pi r <= L + tau
  bool circum_bound_ok = false;     // 2 R <= diam + tau
  bool diameter_bound_ok = false;   // diam <= 2 D + L / 2 + tau
  bool pu_ok = false;               // deficit >= -tau_pu
  bool sandwich_ok = false;

  bool all() const {
    return loop_length_ok && inradius_bound_ok && circum_bound_ok && diameter_bound_ok && pu_ok &&
           sandwich_ok;
  }
};

struct PuReport {
  double sys = 0.0;       // quotient systole
  double area = 0.0;      // quotient area (mesh area / 2)
  double R = 0.0;
  double r = 0.0;
  double deficit = 0.0;   // area / sys^2 - 2 / pi
  double t = 0.0;         // (R - r) / sys
  double L = 0.0;         // lifted systolic loop length, 2 sys
  double D = 0.0;         // max intrinsic distance to the loop
  double diam = 0.0;      // intrinsic diameter lower bound
  Vec3 mvee_axes = Vec3::Zero();  // MVEE semi-axes (a, b, c ascending)
  Ellipsoid john;
  SandwichReport sandwich;
  GeodesicChecks checks;

  double tau_geo = 0.0;
  double tau_pu = 0.0;
  double max_edge = 0.0;  // max mesh edge
  int level = 0;
  int steiner = 0;
  int vertices = 0;
  int faces = 0;
  std::vector<int> loop;
  std::vector<Vec3> loop_points;
};

namespace detail {

inline PuReport assemble_pu_report(const SymmetricConvexMesh& m, const GeodesicGraph& g,
                                   const SystoleResult& sys_res, int steiner, double eps) {
  PuReport rep;
  rep.sys = sys_res.sys;
  rep.area = mesh_area(m) / 2.0;
  rep.steiner = steiner;
  rep.vertices = m.num_vertices();
  rep.faces = m.num_triangles();
  rep.max_edge = m.max_edge_length();
  rep.tau_geo = tau_geo(g);

  rep.loop = systolic_loop(g, sys_res.witness);
  for (const int id : rep.loop) rep.loop_points.push_back(g.pos[id]);
  rep.L = 2.0 * rep.sys;
  const double resummed = loop_length(g, rep.loop);
  rep.checks.loop_length_ok = std::abs(resummed - rep.L) <= 1e-9 * rep.L;
  rep.D = max_distance_to_loop(g, rep.loop);
  rep.diam = intrinsic_diameter(g);

  const auto radii = radii_report(m, eps);
  rep.R = radii.R;
  rep.r = radii.r;
  rep.john = radii.john;
  rep.mvee_axes = radii.mvee.semi_axes;
  rep.sandwich = sandwich_check(m, radii.john, eps);
  rep.checks.sandwich_ok = rep.sandwich.ok();

  rep.deficit = rep.area / (rep.sys * rep.sys) - 2.0 / kPi;
  rep.t = (rep.R - rep.r) / rep.sys;
  const double rho = rep.tau_geo / rep.sys;
  rep.tau_pu = 2.0 / kPi * ((1.0 + rho) * (1.0 + rho) - 1.0);

  rep.checks.inradius_bound_ok = 2.0 * kPi * rep.r <= rep.L + rep.tau_geo;
  rep.checks.circum_bound_ok = 2.0 * rep.R <= rep.diam + rep.tau_geo;
  rep.checks.diameter_bound_ok = rep.diam <= 2.0 * rep.D + rep.L / 2.0 + rep.tau_geo;
  rep.checks.pu_ok = rep.deficit >= -rep.tau_pu;
  return rep;
}

}  // namespace detail

// Full per-surface report at the mesh's own resolution.
inline PuReport pu_report(const SymmetricConvexMesh& m, int steiner = 3, double eps = 1e-6) {
  const GeodesicGraph g = build_graph(m, steiner);
  const SystoleResult sys_res = systole(g);
  return detail::assemble_pu_report(m, g, sys_res, steiner, eps);
}

// Hierarchical pipeline: refine the base mesh up to `level`, resolving the
// systole witness coarse-to-fine. The full vertex scan runs at the last level
// with <= scan_cap vertices; finer levels re-evaluate a band of carried
// witness candidates (vertex indices are stable under refinement).
inline PuReport analyze_body(const SymmetricConvexMesh& base, int level, int steiner = 3,
                             double eps = 1e-6, int scan_cap = 700, int band_cap = 48) {
  std::vector<SymmetricConvexMesh> chain = {base};
  for (int l = 0; l < level; ++l) chain.push_back(refine_once(chain.back()));

  int scan_level = 0;
  for (int l = 0; l <= level; ++l)
    if (chain[l].num_vertices() <= scan_cap) scan_level = l;

  GeodesicGraph g = build_graph(chain[scan_level], steiner);
  std::vector<int> seeds(chain[scan_level].num_vertices());
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = static_cast<int>(i);

  SystoleResult sys_res;
  for (int l = scan_level; l <= level; ++l) {
    if (l > scan_level) g = build_graph(chain[l], steiner);
    const double band = 4.0 * g.max_edge;
    sys_res = systole_scan(g, seeds, band);
    if (l == level) break;
    // Carry the candidate band upward (all seeds within `band` of the best,
    // capped); coarse indices remain valid in the refined mesh.
    std::vector<std::pair<double, int>> ranked;
    std::vector<int> sorted_seeds = seeds;
    std::sort(sorted_seeds.begin(), sorted_seeds.end());
    sorted_seeds.erase(std::unique(sorted_seeds.begin(), sorted_seeds.end()), sorted_seeds.end());
    for (std::size_t i = 0; i < sorted_seeds.size(); ++i)
      if (std::isfinite(sys_res.seed_values[i]) && sys_res.seed_values[i] <= sys_res.sys + band)
        ranked.emplace_back(sys_res.seed_values[i], sorted_seeds[i]);
    std::sort(ranked.begin(), ranked.end());
    if (static_cast<int>(ranked.size()) > band_cap) ranked.resize(band_cap);
    seeds.clear();
    for (const auto& [value, id] : ranked) seeds.push_back(id);
    if (seeds.empty()) seeds.push_back(sys_res.witness);
  }

  PuReport rep = detail::assemble_pu_report(chain[level], g, sys_res, steiner, eps);
  rep.level = level;
  return rep;
}

}  // namespace pulab
