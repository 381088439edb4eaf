#pragma once

// Vertex pop: splits an illegal valence-4 vertex into two triple junctions.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"
#include "bubbles/errors.hpp"

namespace bubbles {

inline constexpr double kPopLengthRel = 1e-4;  // new edge length / mean edge length
inline constexpr double kPopTieTolerance = 1e-9;

namespace surgery_detail {

struct Spoke {
  int edge_id;
  double angle;
  Point dir;
  int left_region;  // region counterclockwise after this spoke
};

inline double ccw_span(double from, double to) {
  double d = to - from;
  while (d < 0) d += 2 * std::numbers::pi;
  while (d >= 2 * std::numbers::pi) d -= 2 * std::numbers::pi;
  return d;
}

// Pairing k joins spokes (k, k+1) at the old vertex and (k+2, k+3) at the new one.
inline Cluster split(const Cluster& c, int vid, const std::array<Spoke, 4>& s, int k, double delta) {
  const ClusterIndex idx(c);
  const Point p = c.vertices[idx.v(vid)].pos;
  const Spoke& a0 = s[k];
  const Spoke& a1 = s[(k + 1) % 4];
  const Spoke& b0 = s[(k + 2) % 4];
  const Spoke& b1 = s[(k + 3) % 4];
  auto unit = [](Point q) {
    const double n = norm(q);
    return n > 0 ? q / n : Point{1.0, 0.0};
  };
  const Point ma = unit(a0.dir + a1.dir), mb = unit(b0.dir + b1.dir);
  const Point pa = p + ma * (0.5 * delta), pb = p + mb * (0.5 * delta);
  Cluster out = c;
  const int nv = c.next_vertex_id();
  out.vertices[idx.v(vid)].pos = pa;
  out.vertices.push_back({nv, pb, false});
  for (int eid : {b0.edge_id, b1.edge_id}) {
    Edge& e = out.edges[idx.e(eid)];
    if (e.tail == vid) e.tail = nv;
    if (e.head == vid) e.head = nv;
  }
  // Sectors between a1->b0 and b1->a0 are separated by the new edge pa -> pb.
  const Point w = pb - pa;
  const double mid = a1.angle + 0.5 * ccw_span(a1.angle, b0.angle);
  const bool a1_sector_left = cross(w, Point{std::cos(mid), std::sin(mid)}) > 0;
  const int left = a1_sector_left ? a1.left_region : b1.left_region;
  const int right = a1_sector_left ? b1.left_region : a1.left_region;
  out.edges.push_back({c.next_edge_id(), vid, nv, left, right});
  return out;
}

}  // namespace surgery_detail

// Splits a valence-4 vertex away from the origin into two valence-3 vertices
// joined by a short new edge. Of the two pairings of adjacent incident edges,
// the one with lower weighted perimeter after one projection step is kept;
// near-ties go to the pairing that joins the lowest incident edge id with its
// lower-id neighbour.
inline Cluster pop_vertex(const Cluster& c, int vertex_id) {
  using namespace surgery_detail;
  const ClusterIndex idx(c);
  const auto inc = incidence(c);
  const auto it = inc.find(vertex_id);
  if (it == inc.end()) throw SurgeryError("pop_vertex: unknown vertex " + std::to_string(vertex_id));
  if (it->second.size() != 4)
    throw SurgeryError("pop_vertex: vertex " + std::to_string(vertex_id) + " has valence " +
                       std::to_string(it->second.size()) + ", expected 4");
  const Point p = c.vertices[idx.v(vertex_id)].pos;
  if (norm(p) <= origin_radius(c))
    throw SurgeryError("pop_vertex: vertex " + std::to_string(vertex_id) +
                       " lies at the origin, where valence 4 is admissible");

  std::array<Spoke, 4> spokes{};
  for (std::size_t i = 0; i < 4; ++i) {
    const Edge& e = c.edges[idx.e(it->second[i])];
    const bool out = e.tail == vertex_id;
    const Point q = c.vertices[idx.v(other_end(e, vertex_id))].pos;
    const Point d = q - p;
    spokes[i] = {e.id, std::atan2(d.y, d.x), d / norm(d), out ? e.left_region : e.right_region};
  }
  std::sort(spokes.begin(), spokes.end(), [](const Spoke& a, const Spoke& b) { return a.angle < b.angle; });

  double mean_len = 0.0;
  for (const auto& e : c.edges) mean_len += distance(c.vertices[idx.v(e.tail)].pos, c.vertices[idx.v(e.head)].pos);
  mean_len /= static_cast<double>(c.edges.size());
  const double delta = kPopLengthRel * mean_len;

  std::array<Cluster, 2> candidates{split(c, vertex_id, spokes, 0, delta), split(c, vertex_id, spokes, 1, delta)};
  std::array<double, 2> energy{};
  for (int k = 0; k < 2; ++k) {
    try {
      energy[k] = weighted_perimeter(detail::project(candidates[k], 1, 0.0, default_rule()).cluster);
    } catch (const Error&) {
      energy[k] = INFINITY;
    }
  }
  int pick;
  if (std::abs(energy[0] - energy[1]) < kPopTieTolerance * std::max(1.0, std::abs(energy[0]))) {
    // Spoke holding the lowest edge id, joined to its lower-id neighbour.
    std::size_t lo = 0;
    for (std::size_t i = 1; i < 4; ++i)
      if (spokes[i].edge_id < spokes[lo].edge_id) lo = i;
    const int prev_id = spokes[(lo + 3) % 4].edge_id, next_id = spokes[(lo + 1) % 4].edge_id;
    // Pairing k joins (k, k+1) and (k+2, k+3).
    const std::size_t first = next_id < prev_id ? lo : (lo + 3) % 4;
    pick = static_cast<int>(first % 2);
  } else {
    pick = energy[0] < energy[1] ? 0 : 1;
  }
  return candidates[static_cast<std::size_t>(pick)];
}

}  // namespace bubbles
