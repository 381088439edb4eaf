#pragma once

// The discrete cluster: vertices, oriented edges separating two labels, and
// regions with target weighted areas. Plus the topology queries and mesh
// surgery that do not need the energy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bubbles/errors.hpp"
#include "bubbles/geometry.hpp"
#include "bubbles/point.hpp"

namespace bubbles {

inline constexpr int kExterior = -1;

struct Vertex {
  int id = 0;
  Point pos;
  bool pinned_to_origin = false;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  int id = 0;
  int tail = 0;
  int head = 0;
  int left_region = kExterior;
  int right_region = kExterior;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Region {
  int id = 0;
  double target_weighted_area = 0.0;
  std::string label;
  friend bool operator==(const Region&, const Region&) = default;
};

struct Cluster {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Region> regions;
  DensityField density;

  friend bool operator==(const Cluster& a, const Cluster& b) {
    return a.vertices == b.vertices && a.edges == b.edges && a.regions == b.regions &&
           a.density.p == b.density.p;
  }

  int next_vertex_id() const {
    int m = 0;
    for (const auto& v : vertices) m = std::max(m, v.id);
    return m + 1;
  }
  int next_edge_id() const {
    int m = 0;
    for (const auto& e : edges) m = std::max(m, e.id);
    return m + 1;
  }
};

// id -> position in the owning vector, built once per query batch.
struct ClusterIndex {
  std::unordered_map<int, std::size_t> vertex;
  std::unordered_map<int, std::size_t> edge;
  std::unordered_map<int, std::size_t> region;

  explicit ClusterIndex(const Cluster& c) {
    for (std::size_t i = 0; i < c.vertices.size(); ++i) vertex.emplace(c.vertices[i].id, i);
    for (std::size_t i = 0; i < c.edges.size(); ++i) edge.emplace(c.edges[i].id, i);
    for (std::size_t i = 0; i < c.regions.size(); ++i) region.emplace(c.regions[i].id, i);
  }
  std::size_t v(int id) const {
    auto it = vertex.find(id);
    if (it == vertex.end()) throw Error("unknown vertex id " + std::to_string(id));
    return it->second;
  }
  std::size_t e(int id) const {
    auto it = edge.find(id);
    if (it == edge.end()) throw Error("unknown edge id " + std::to_string(id));
    return it->second;
  }
};

inline std::string region_name(int id) { return id == kExterior ? "exterior" : std::to_string(id); }

// Incident edge ids per vertex id, in edge order.
inline std::map<int, std::vector<int>> incidence(const Cluster& c) {
  std::map<int, std::vector<int>> inc;
  for (const auto& v : c.vertices) inc[v.id];
  for (const auto& e : c.edges) {
    inc[e.tail].push_back(e.id);
    inc[e.head].push_back(e.id);
  }
  return inc;
}

inline int other_end(const Edge& e, int vid) { return e.tail == vid ? e.head : e.tail; }

// Largest distance between two vertices (convex hull + all hull pairs).
inline double diameter(const Cluster& c) {
  std::vector<Point> pts;
  pts.reserve(c.vertices.size());
  for (const auto& v : c.vertices) pts.push_back(v.pos);
  if (pts.size() < 2) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return detail::lex_less(a, b); });
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, norm2(hull[i] - hull[j]));
  return std::sqrt(best);
}

// Radius within which a vertex counts as sitting on the origin.
inline double origin_radius(const Cluster& c) { return 1e-6 * diameter(c); }

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  invalid_value,
  dangling_edge,
  open_boundary,
  illegal_valence,
  region_mismatch,
};

struct Violation {
  ViolationKind kind;
  std::string message;
  int vertex_id = 0;
  int edge_id = 0;
  int region_id = 0;
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::invalid_value: return "invalid-value";
    case ViolationKind::dangling_edge: return "dangling-edge";
    case ViolationKind::open_boundary: return "open-boundary";
    case ViolationKind::illegal_valence: return "illegal-valence";
    case ViolationKind::region_mismatch: return "region-mismatch";
  }
  return "?";
}

inline std::vector<Violation> validate(const Cluster& c) {
  std::vector<Violation> out;
  auto add = [&](ViolationKind k, std::string msg, int v = 0, int e = 0, int r = 0) {
    out.push_back({k, std::move(msg), v, e, r});
  };
  if (!(c.density.p >= 0.0) || !std::isfinite(c.density.p))
    add(ViolationKind::invalid_value, "density exponent must be finite and >= 0");

  std::set<int> vids, eids, rids;
  for (const auto& v : c.vertices) {
    if (!vids.insert(v.id).second)
      add(ViolationKind::invalid_value, "duplicate vertex id " + std::to_string(v.id), v.id);
    if (!is_finite(v.pos))
      add(ViolationKind::invalid_value, "vertex " + std::to_string(v.id) + " has non-finite position", v.id);
  }
  for (const auto& r : c.regions) {
    if (r.id == kExterior || !rids.insert(r.id).second)
      add(ViolationKind::region_mismatch, "bad or duplicate region id " + std::to_string(r.id), 0, 0, r.id);
    if (!(r.target_weighted_area > 0.0) || !std::isfinite(r.target_weighted_area))
      add(ViolationKind::invalid_value, "region " + std::to_string(r.id) + " target area must be positive",
          0, 0, r.id);
  }
  const double eps_origin = origin_radius(c);

  std::map<int, int> valence;
  for (const auto& v : c.vertices) valence[v.id] = 0;
  // Per region: out-degree minus in-degree of its oriented boundary at each vertex.
  std::map<int, std::map<int, int>> balance;
  std::map<int, int> boundary_edges;
  for (const auto& e : c.edges) {
    if (!eids.insert(e.id).second)
      add(ViolationKind::invalid_value, "duplicate edge id " + std::to_string(e.id), 0, e.id);
    const bool tail_ok = vids.count(e.tail) > 0, head_ok = vids.count(e.head) > 0;
    if (!tail_ok || !head_ok) {
      add(ViolationKind::dangling_edge, "edge " + std::to_string(e.id) + " references a missing vertex", 0,
          e.id);
      continue;
    }
    if (e.tail == e.head) {
      add(ViolationKind::dangling_edge, "edge " + std::to_string(e.id) + " is a self-loop", e.tail, e.id);
      continue;
    }
    ++valence[e.tail];
    ++valence[e.head];
    if (e.left_region == e.right_region)
      add(ViolationKind::region_mismatch,
          "edge " + std::to_string(e.id) + " has the same region on both sides", 0, e.id, e.left_region);
    for (int r : {e.left_region, e.right_region}) {
      if (r != kExterior && rids.count(r) == 0)
        add(ViolationKind::region_mismatch,
            "edge " + std::to_string(e.id) + " references unknown region " + std::to_string(r), 0, e.id, r);
    }
    if (e.left_region != kExterior) {
      ++balance[e.left_region][e.tail];
      --balance[e.left_region][e.head];
      ++boundary_edges[e.left_region];
    }
    if (e.right_region != kExterior) {
      ++balance[e.right_region][e.head];
      --balance[e.right_region][e.tail];
      ++boundary_edges[e.right_region];
    }
  }
  for (const auto& r : c.regions) {
    if (boundary_edges[r.id] == 0) {
      add(ViolationKind::open_boundary, "region " + std::to_string(r.id) + " has no boundary", 0, 0, r.id);
      continue;
    }
    for (const auto& [vid, b] : balance[r.id]) {
      if (b != 0) {
        add(ViolationKind::open_boundary,
            "region " + std::to_string(r.id) + " boundary is open at vertex " + std::to_string(vid), vid, 0,
            r.id);
        break;
      }
    }
  }
  for (const auto& v : c.vertices) {
    const int val = valence[v.id];
    if (val <= 1) {
      add(ViolationKind::dangling_edge,
          "vertex " + std::to_string(v.id) + " has valence " + std::to_string(val), v.id);
    } else if (val == 4) {
      if (norm(v.pos) > eps_origin)
        add(ViolationKind::illegal_valence,
            "valence-4 vertex " + std::to_string(v.id) + " away from the origin", v.id);
    } else if (val > 4) {
      add(ViolationKind::illegal_valence,
          "vertex " + std::to_string(v.id) + " has valence " + std::to_string(val), v.id);
    }
    if (v.pinned_to_origin && norm(v.pos) > eps_origin)
      add(ViolationKind::invalid_value, "pinned vertex " + std::to_string(v.id) + " is not at the origin",
          v.id);
  }
  return out;
}

// Returns a message when the edge graph has more than one component. This is
// a warning, not a violation.
inline std::optional<std::string> connectivity_warning(const Cluster& c) {
  if (c.vertices.empty()) return std::nullopt;
  std::map<int, std::vector<int>> adj;
  for (const auto& v : c.vertices) adj[v.id];
  for (const auto& e : c.edges) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::set<int> seen{c.vertices.front().id};
  std::vector<int> stack{c.vertices.front().id};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (seen.insert(w).second) stack.push_back(w);
  }
  if (seen.size() == c.vertices.size()) return std::nullopt;
  return "edge graph is disconnected (" + std::to_string(seen.size()) + " of " +
         std::to_string(c.vertices.size()) + " vertices reachable)";
}

inline std::string describe(const std::vector<Violation>& vs) {
  std::string s;
  for (const auto& v : vs) {
    if (!s.empty()) s += "; ";
    s += std::string(to_string(v.kind)) + ": " + v.message;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Boundaries and arcs

// A closed walk. edge_reversed[i] says edge i is walked head -> tail.
struct Loop {
  std::vector<int> vertex_ids;
  std::vector<int> edge_ids;
  std::vector<bool> edge_reversed;
};

// Loops bounding the region with its interior on the left (counterclockwise
// for an outer boundary).
inline std::vector<Loop> region_boundary(const Cluster& c, int region_id) {
  if (std::none_of(c.regions.begin(), c.regions.end(), [&](const Region& r) { return r.id == region_id; }))
    throw MissingRegionError("region_boundary: unknown region " + std::to_string(region_id));
  struct Half {
    int edge, from, to;
    bool reversed;
  };
  std::vector<Half> halves;
  for (const auto& e : c.edges) {
    if (e.left_region == region_id) halves.push_back({e.id, e.tail, e.head, false});
    if (e.right_region == region_id) halves.push_back({e.id, e.head, e.tail, true});
  }
  std::map<int, std::vector<std::size_t>> outgoing;
  for (std::size_t i = 0; i < halves.size(); ++i) outgoing[halves[i].from].push_back(i);
  std::vector<bool> used(halves.size(), false);
  std::vector<Loop> loops;
  for (std::size_t start = 0; start < halves.size(); ++start) {
    if (used[start]) continue;
    Loop loop;
    std::size_t cur = start;
    while (true) {
      used[cur] = true;
      loop.vertex_ids.push_back(halves[cur].from);
      loop.edge_ids.push_back(halves[cur].edge);
      loop.edge_reversed.push_back(halves[cur].reversed);
      const int at = halves[cur].to;
      if (at == halves[start].from) break;
      std::optional<std::size_t> next;
      for (std::size_t h : outgoing[at])
        if (!used[h]) {
          next = h;
          break;
        }
      if (!next) throw ValidationError("region_boundary: boundary of region " + std::to_string(region_id) +
                                       " is open at vertex " + std::to_string(at));
      cur = *next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

inline std::vector<Point> loop_points(const Cluster& c, const ClusterIndex& idx, const Loop& loop) {
  std::vector<Point> pts;
  pts.reserve(loop.vertex_ids.size());
  for (int vid : loop.vertex_ids) pts.push_back(c.vertices[idx.v(vid)].pos);
  return pts;
}

// Maximal chain of edges through valence-2 vertices. Left and right regions
// are relative to the walking direction.
struct Arc {
  std::vector<int> vertex_ids;  // closed arcs do not repeat the first vertex
  std::vector<int> edge_ids;
  std::vector<bool> edge_reversed;
  int left_region = kExterior;
  int right_region = kExterior;
  bool closed = false;

  int first() const { return vertex_ids.front(); }
  int last() const { return closed ? vertex_ids.front() : vertex_ids.back(); }
};

inline std::vector<Arc> extract_arcs(const Cluster& c) {
  const ClusterIndex idx(c);
  const auto inc = incidence(c);
  std::set<int> used;
  std::vector<Arc> arcs;
  auto walk = [&](int start_vertex, int first_edge, bool closed) {
    Arc arc;
    arc.closed = closed;
    int v = start_vertex;
    int eid = first_edge;
    arc.vertex_ids.push_back(v);
    while (true) {
      const Edge& e = c.edges[idx.e(eid)];
      used.insert(eid);
      const bool rev = e.head == v;
      if (arc.edge_ids.empty()) {
        arc.left_region = rev ? e.right_region : e.left_region;
        arc.right_region = rev ? e.left_region : e.right_region;
      }
      arc.edge_ids.push_back(eid);
      arc.edge_reversed.push_back(rev);
      v = other_end(e, v);
      if (closed && v == start_vertex) break;
      const auto& ie = inc.at(v);
      if (!closed && ie.size() != 2) {
        arc.vertex_ids.push_back(v);
        break;
      }
      arc.vertex_ids.push_back(v);
      const int next = ie[0] == eid ? ie[1] : ie[0];
      if (used.count(next)) break;
      eid = next;
    }
    arcs.push_back(std::move(arc));
  };
  for (const auto& vtx : c.vertices) {
    const auto& ie = inc.at(vtx.id);
    if (ie.size() == 2) continue;
    for (int eid : ie)
      if (!used.count(eid)) walk(vtx.id, eid, false);
  }
  // Leftovers are loops made only of valence-2 vertices.
  for (const auto& e : c.edges) {
    if (used.count(e.id)) continue;
    walk(e.tail, e.id, true);
  }
  return arcs;
}

inline std::vector<Point> arc_points(const Cluster& c, const ClusterIndex& idx, const Arc& arc) {
  std::vector<Point> pts;
  pts.reserve(arc.vertex_ids.size());
  for (int vid : arc.vertex_ids) pts.push_back(c.vertices[idx.v(vid)].pos);
  return pts;
}

inline double arc_euclidean_length(const Cluster& c, const ClusterIndex& idx, const Arc& arc) {
  double len = 0.0;
  for (int eid : arc.edge_ids) {
    const Edge& e = c.edges[idx.e(eid)];
    len += distance(c.vertices[idx.v(e.tail)].pos, c.vertices[idx.v(e.head)].pos);
  }
  return len;
}

// ---------------------------------------------------------------------------
// Refinement and collapse

// Splits every edge longer than max_segment_length by repeated halving.
inline Cluster refine(const Cluster& c, double max_segment_length) {
  if (!(max_segment_length > 0.0)) throw Error("refine: max_segment_length must be positive");
  Cluster out = c;
  const ClusterIndex idx(c);
  int next_v = c.next_vertex_id();
  int next_e = c.next_edge_id();
  out.edges.clear();
  std::vector<Edge> appended;
  for (const auto& e : c.edges) {
    const Point a = c.vertices[idx.v(e.tail)].pos;
    const Point b = c.vertices[idx.v(e.head)].pos;
    const double len = distance(a, b);
    int pieces = 1;
    while (len / pieces > max_segment_length) pieces *= 2;
    if (pieces == 1) {
      out.edges.push_back(e);
      continue;
    }
    int prev = e.tail;
    for (int i = 1; i <= pieces; ++i) {
      int cur = e.head;
      if (i < pieces) {
        cur = next_v++;
        const double t = static_cast<double>(i) / pieces;
        out.vertices.push_back({cur, a + (b - a) * t, false});
      }
      Edge piece{i == 1 ? e.id : next_e++, prev, cur, e.left_region, e.right_region};
      if (i == 1)
        out.edges.push_back(piece);
      else
        appended.push_back(piece);
      prev = cur;
    }
  }
  out.edges.insert(out.edges.end(), appended.begin(), appended.end());
  return out;
}

// Merges the endpoints of an edge. The survivor sits at the origin when either
// endpoint is pinned, otherwise at the midpoint of the endpoints of highest
// valence (so a junction absorbing a valence-2 neighbour stays put).
inline Cluster collapse_edge(const Cluster& c, int edge_id) {
  const ClusterIndex idx(c);
  const Edge target = c.edges[idx.e(edge_id)];
  const auto inc = incidence(c);
  const int u = target.tail, w = target.head;
  const int val_u = static_cast<int>(inc.at(u).size());
  const int val_w = static_cast<int>(inc.at(w).size());
  for (const auto& e : c.edges) {
    if (e.id == edge_id) continue;
    if ((e.tail == u && e.head == w) || (e.tail == w && e.head == u))
      throw SurgeryError("collapse_edge: edge " + std::to_string(edge_id) + " has a parallel edge " +
                         std::to_string(e.id) + "; collapse would create a self-loop");
  }
  if (val_u + val_w - 2 > 4)
    throw SurgeryError("collapse_edge: merged vertex would have valence " +
                       std::to_string(val_u + val_w - 2));
  const Vertex& vu = c.vertices[idx.v(u)];
  const Vertex& vw = c.vertices[idx.v(w)];
  int keep = u, drop = w;
  if (vw.pinned_to_origin && !vu.pinned_to_origin) std::swap(keep, drop);
  else if (!vu.pinned_to_origin && val_w > val_u) std::swap(keep, drop);
  Point pos;
  bool pinned = vu.pinned_to_origin || vw.pinned_to_origin;
  if (pinned)
    pos = {0.0, 0.0};
  else if (val_u > val_w)
    pos = vu.pos;
  else if (val_w > val_u)
    pos = vw.pos;
  else
    pos = (vu.pos + vw.pos) * 0.5;

  Cluster out;
  out.density = c.density;
  out.regions = c.regions;
  for (const auto& v : c.vertices) {
    if (v.id == drop) continue;
    if (v.id == keep)
      out.vertices.push_back({keep, pos, pinned});
    else
      out.vertices.push_back(v);
  }
  for (auto e : c.edges) {
    if (e.id == edge_id) continue;
    if (e.tail == drop) e.tail = keep;
    if (e.head == drop) e.head = keep;
    out.edges.push_back(e);
  }
  return out;
}

// Removes valence-2 vertices whose incident edges are shorter than
// min_length, never reducing an arc below one edge or a loop below three.
inline Cluster coarsen(const Cluster& c, double min_length) {
  Cluster out = c;
  bool changed = true;
  while (changed) {
    changed = false;
    const ClusterIndex idx(out);
    const auto inc = incidence(out);
    // Pick the globally shortest eligible edge each pass for determinism.
    double best = min_length;
    std::optional<int> best_edge;
    for (const auto& e : out.edges) {
      const int vt = static_cast<int>(inc.at(e.tail).size());
      const int vh = static_cast<int>(inc.at(e.head).size());
      if (vt != 2 && vh != 2) continue;
      const double len = distance(out.vertices[idx.v(e.tail)].pos, out.vertices[idx.v(e.head)].pos);
      if (len >= best) continue;
      // A valence-2 endpoint must be the one that disappears; refuse when
      // that endpoint is pinned.
      const int v2 = vt == 2 ? e.tail : e.head;
      if (out.vertices[idx.v(v2)].pinned_to_origin) continue;
      // Refuse when the two endpoints share a neighbour (would create parallel edges).
      std::set<int> nt, nh;
      for (int eid : inc.at(e.tail))
        if (eid != e.id) nt.insert(other_end(out.edges[idx.e(eid)], e.tail));
      for (int eid : inc.at(e.head))
        if (eid != e.id) nh.insert(other_end(out.edges[idx.e(eid)], e.head));
      bool shared = false;
      for (int n : nt)
        if (nh.count(n)) shared = true;
      if (shared) continue;
      best = len;
      best_edge = e.id;
    }
    if (best_edge) {
      out = collapse_edge(out, *best_edge);
      changed = true;
    }
  }
  return out;
}

}  // namespace bubbles
