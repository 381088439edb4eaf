#pragma once

// Initial configurations: the exact standard double bubble, circle, linear
// chain, and Euclidean-type triple and quadruple bubbles. Seeds only
// approximate their area targets; the constraint projector does the rest.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"
#include "bubbles/errors.hpp"
#include "bubbles/geometry.hpp"

namespace bubbles {

inline constexpr int kDefaultSegmentsPerArc = 32;

namespace seed_detail {

// Incrementally assembles a cluster from polyline arcs between shared
// vertices.
class Builder {
 public:
  explicit Builder(DensityField d) { c_.density = d; }

  int vertex(Point p, bool pinned = false) {
    const int id = next_v_++;
    c_.vertices.push_back({id, p, pinned});
    return id;
  }
  int region(const std::string& label, double target) {
    const int id = static_cast<int>(c_.regions.size()) + 1;
    c_.regions.push_back({id, target, label});
    return id;
  }
  // Chain of edges from vertex `from` through `interior` points to `to`.
  void arc(int from, const std::vector<Point>& interior, int to, int left, int right) {
    int prev = from;
    for (const auto& p : interior) {
      const int v = vertex(p);
      c_.edges.push_back({next_e_++, prev, v, left, right});
      prev = v;
    }
    c_.edges.push_back({next_e_++, prev, to, left, right});
  }
  Point pos(int vid) const { return c_.vertices[static_cast<std::size_t>(vid - 1)].pos; }
  Cluster take() { return std::move(c_); }

 private:
  Cluster c_;
  int next_v_ = 1;
  int next_e_ = 1;
};

// Interior points of the circular arc from angle a0 to a1 (signed sweep).
inline std::vector<Point> circle_interior(Point center, double radius, double a0, double a1, int segments) {
  std::vector<Point> pts;
  for (int i = 1; i < segments; ++i) {
    const double t = a0 + (a1 - a0) * i / segments;
    pts.push_back(center + Point{std::cos(t), std::sin(t)} * radius);
  }
  return pts;
}

// Interior points of the circular arc from a to b whose tangent at a is the
// chord direction rotated by `turn` (counterclockwise positive). Positive
// turns bulge to the left of a -> b; turn == 0 gives a straight segment.
inline std::vector<Point> arc_by_turn(Point a, Point b, double turn, int segments) {
  std::vector<Point> pts;
  if (turn == 0.0) {
    for (int i = 1; i < segments; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / segments));
    return pts;
  }
  const double chord = distance(a, b);
  const double radius = chord / (2.0 * std::sin(std::abs(turn)));
  const Point mid = (a + b) * 0.5;
  const Point left = perp((b - a) / chord);
  const double off = radius * std::cos(std::abs(turn));
  const Point center = turn > 0 ? mid - left * off : mid + left * off;
  const double a0 = std::atan2(a.y - center.y, a.x - center.x);
  double a1 = std::atan2(b.y - center.y, b.x - center.x);
  if (turn > 0) {
    while (a1 > a0) a1 -= 2 * std::numbers::pi;
  } else {
    while (a1 < a0) a1 += 2 * std::numbers::pi;
  }
  return circle_interior(center, radius, a0, a1, segments);
}

inline double total_target(const std::vector<double>& areas) {
  double s = 0.0;
  for (double a : areas) s += a;
  return s;
}

inline void require_positive(const std::vector<double>& areas, const char* who) {
  for (double a : areas)
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(std::string(who) + ": areas must be positive");
}

}  // namespace seed_detail

// Scales every vertex position by lambda about the origin.
inline Cluster scale_cluster(const Cluster& c, double lambda) {
  if (!(lambda > 0.0)) throw InvalidScaleError("scale_cluster: scale must be positive");
  Cluster out = c;
  for (auto& v : out.vertices) v.pos = v.pos * lambda;
  return out;
}

inline Cluster translate_cluster(const Cluster& c, Point offset) {
  Cluster out = c;
  for (auto& v : out.vertices) v.pos += offset;
  return out;
}

// Uses weighted area ~ lambda^(p+2) to match the total of the region targets.
inline Cluster scale_to_total_area(const Cluster& c) {
  const auto areas = weighted_areas(c);
  double have = 0.0, want = 0.0;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    have += areas[i];
    want += c.regions[i].target_weighted_area;
  }
  if (!(have > 0.0)) throw Error("scale_to_total_area: seed has non-positive area");
  return scale_cluster(c, std::pow(want / have, 1.0 / (c.density.p + 2.0)));
}

// ---------------------------------------------------------------------------
// Standard double bubble

struct DoubleBubbleSpec {
  double r1 = 1.0;
  double r2 = 1.0;
  int segments_per_arc = kDefaultSegmentsPerArc;

  // Distance between the two circle centres; the radii meet at 60 degrees.
  double center_distance() const { return std::sqrt(r1 * r1 + r2 * r2 - r1 * r2); }
  // Radius of the middle interface, or nullopt when it is straight.
  std::optional<double> bulge_radius() const {
    if (r1 == r2) return std::nullopt;
    return 1.0 / std::abs(1.0 / r1 - 1.0 / r2);
  }
};

enum class DoublePlacement { vertex_at_origin, center_at_origin };

// Geometry of the construction before placement: circle 1 at the origin,
// circle 2 at (L, 0), junctions at (xi, +-h).
struct DoubleBubbleGeometry {
  Point center1, center2;
  Point top, bottom;
  std::optional<Point> bulge_center;
};

inline DoubleBubbleGeometry double_bubble_geometry(const DoubleBubbleSpec& s) {
  DoubleBubbleGeometry g;
  const double len = s.center_distance();
  g.center1 = {0.0, 0.0};
  g.center2 = {len, 0.0};
  const double xi = (len * len + s.r1 * s.r1 - s.r2 * s.r2) / (2.0 * len);
  const double h = std::sqrt(std::max(0.0, s.r1 * s.r1 - xi * xi));
  g.top = {xi, h};
  g.bottom = {xi, -h};
  if (auto rb = s.bulge_radius()) {
    // The interface bulges into the larger lobe, so its centre sits on the
    // smaller lobe's side of the chord.
    const double off = std::sqrt(std::max(0.0, *rb * *rb - h * h));
    g.bulge_center = Point{s.r1 > s.r2 ? xi + off : xi - off, 0.0};
  }
  return g;
}

// Regions: 1 = lobe of radius r1 (label "A"), 2 = lobe of radius r2 ("B").
// Targets are the seed's own weighted areas under `d`.
inline Cluster standard_double_bubble(const DoubleBubbleSpec& s, DoublePlacement placement,
                                      DensityField d = {}) {
  if (!(s.r1 > 0.0) || !(s.r2 > 0.0)) throw Error("standard_double_bubble: radii must be positive");
  if (s.segments_per_arc < 2) throw Error("standard_double_bubble: segments_per_arc must be >= 2");
  require_valid(d);
  const auto g = double_bubble_geometry(s);
  const int n = s.segments_per_arc;
  const Point shift = placement == DoublePlacement::vertex_at_origin ? -g.bottom : -Point{g.top.x, 0.0};

  seed_detail::Builder b(d);
  const int ra = b.region("A", 1.0);
  const int rb = b.region("B", 1.0);
  const int top = b.vertex(g.top + shift, false);
  const int bottom = b.vertex(g.bottom + shift, placement == DoublePlacement::vertex_at_origin);
  auto shifted = [&](std::vector<Point> pts) {
    for (auto& p : pts) p += shift;
    return pts;
  };
  const double th1 = std::atan2(g.top.y, g.top.x);
  b.arc(top, shifted(seed_detail::circle_interior(g.center1, s.r1, th1, 2 * std::numbers::pi - th1, n)),
        bottom, ra, kExterior);
  const double phq = std::atan2(g.bottom.y - g.center2.y, g.bottom.x - g.center2.x);
  const double php = std::atan2(g.top.y - g.center2.y, g.top.x - g.center2.x);
  b.arc(bottom, shifted(seed_detail::circle_interior(g.center2, s.r2, phq, php, n)), top, rb, kExterior);
  // Middle interface from bottom to top; lobe A on its left.
  std::vector<Point> middle;
  if (!g.bulge_center) {
    for (int i = 1; i < n; ++i) middle.push_back(g.bottom + (g.top - g.bottom) * (static_cast<double>(i) / n));
  } else {
    const Point cb = *g.bulge_center;
    const double rbulge = *s.bulge_radius();
    const double a0 = std::atan2(g.bottom.y - cb.y, g.bottom.x - cb.x);
    double a1 = std::atan2(g.top.y - cb.y, g.top.x - cb.x);
    // Take the short way round.
    if (a1 - a0 > std::numbers::pi) a1 -= 2 * std::numbers::pi;
    if (a0 - a1 > std::numbers::pi) a1 += 2 * std::numbers::pi;
    middle = seed_detail::circle_interior(cb, rbulge, a0, a1, n);
  }
  b.arc(bottom, shifted(middle), top, ra, rb);
  Cluster c = b.take();
  const auto areas = weighted_areas(c);
  for (std::size_t i = 0; i < areas.size(); ++i) c.regions[i].target_weighted_area = areas[i];
  return c;
}

// ---------------------------------------------------------------------------
// Circle

inline Cluster circle_seed(double area, Point center, DensityField d, int segments = 64) {
  if (!(area > 0.0)) throw Error("circle_seed: area must be positive");
  require_valid(d);
  auto polygon = [&](double r) {
    std::vector<Point> pts;
    for (int i = 0; i < segments; ++i) {
      const double t = 2 * std::numbers::pi * i / segments;
      pts.push_back(center + Point{std::cos(t), std::sin(t)} * r);
    }
    return pts;
  };
  // Weighted area grows monotonically with the radius; bracket and bisect.
  double lo = 0.0, hi = 1.0;
  while (loop_weighted_area(polygon(hi), d) < area) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (loop_weighted_area(polygon(mid), d) < area ? lo : hi) = mid;
  }
  const auto pts = polygon(0.5 * (lo + hi));
  seed_detail::Builder b(d);
  const int r = b.region("A", area);
  std::vector<int> ids;
  for (const auto& p : pts) ids.push_back(b.vertex(p));
  Cluster c = b.take();
  for (std::size_t i = 0; i < ids.size(); ++i)
    c.edges.push_back({static_cast<int>(i) + 1, ids[i], ids[(i + 1) % ids.size()], r, kExterior});
  return c;
}

// ---------------------------------------------------------------------------
// Linear chain

namespace seed_detail {

// Chain with the given Euclidean radii, leftmost point at the origin.
inline Cluster chain_from_radii(const std::vector<double>& r, const std::vector<double>& areas, DensityField d,
                                int seg) {
  const std::size_t n = r.size();
  std::vector<double> cx(n);
  cx[0] = r[0];
  for (std::size_t i = 1; i < n; ++i)
    cx[i] = cx[i - 1] + std::sqrt(r[i - 1] * r[i - 1] + r[i] * r[i] - r[i - 1] * r[i]);
  // Interface i (between bubble i-1 and i) at the radical line.
  std::vector<double> ix(n), ih(n);
  for (std::size_t i = 1; i < n; ++i) {
    const double len = cx[i] - cx[i - 1];
    const double x = (len * len + r[i - 1] * r[i - 1] - r[i] * r[i]) / (2.0 * len);
    ix[i] = cx[i - 1] + x;
    ih[i] = std::sqrt(std::max(1e-12, r[i - 1] * r[i - 1] - x * x));
  }
  Builder b(d);
  std::vector<int> reg(n);
  for (std::size_t i = 0; i < n; ++i) reg[i] = b.region(std::string(1, static_cast<char>('A' + i)), areas[i]);
  std::vector<int> top(n), bot(n);
  for (std::size_t i = 1; i < n; ++i) {
    top[i] = b.vertex({ix[i], ih[i]});
    bot[i] = b.vertex({ix[i], -ih[i]});
  }
  auto ang = [&](std::size_t bubble, Point p) { return std::atan2(p.y, p.x - cx[bubble]); };
  // Leftmost bubble: from top[1] counterclockwise round the left to bot[1].
  {
    const double a0 = ang(0, b.pos(top[1]));
    const double a1 = 2 * std::numbers::pi - a0;
    const int s = seg % 2 ? seg + 1 : seg;  // even, so a vertex lands on the origin
    b.arc(top[1], circle_interior({cx[0], 0.0}, r[0], a0, a1, s), bot[1], reg[0], kExterior);
  }
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<Point> pts;
    for (int k = 1; k < seg; ++k)
      pts.push_back(b.pos(bot[i]) + (b.pos(top[i]) - b.pos(bot[i])) * (static_cast<double>(k) / seg));
    b.arc(bot[i], pts, top[i], reg[i - 1], reg[i]);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Middle bubble: bottom arc left to right, top arc right to left.
    const double b0 = ang(i, b.pos(bot[i])), b1 = ang(i, b.pos(bot[i + 1]));
    b.arc(bot[i], circle_interior({cx[i], 0.0}, r[i], b0, b1, seg), bot[i + 1], reg[i], kExterior);
    const double t0 = ang(i, b.pos(top[i + 1])), t1 = ang(i, b.pos(top[i]));
    b.arc(top[i + 1], circle_interior({cx[i], 0.0}, r[i], t0, t1, seg), top[i], reg[i], kExterior);
  }
  {
    const std::size_t last = n - 1;
    const double a0 = ang(last, b.pos(bot[last]));
    const double a1 = ang(last, b.pos(top[last]));
    b.arc(bot[last], circle_interior({cx[last], 0.0}, r[last], a0, a1, seg), top[last], reg[last], kExterior);
  }
  return b.take();
}

}  // namespace seed_detail

// Bubbles in a row along the x axis sharing straight vertical interfaces,
// leftmost point at the origin. Radii are adjusted by fixed-point iteration
// so that the weighted areas come close to the targets.
inline Cluster chain_seed(const std::vector<double>& areas, DensityField d,
                          int segments_per_arc = kDefaultSegmentsPerArc) {
  if (areas.size() < 2) throw Error("chain_seed: need at least two areas");
  seed_detail::require_positive(areas, "chain_seed");
  require_valid(d);
  const std::size_t n = areas.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = std::sqrt(areas[i] / std::numbers::pi);
  // Interfaces stay straight, so radii within a factor of two of each other.
  for (int it = 0; it < 60; ++it) {
    const auto have = weighted_areas(seed_detail::chain_from_radii(r, areas, d, segments_per_arc));
    for (std::size_t i = 0; i < n; ++i) r[i] *= std::pow(areas[i] / have[i], 0.5 / (d.p + 2.0));
    const double rmax = *std::max_element(r.begin(), r.end());
    for (auto& ri : r) ri = std::max(ri, 0.5 * rmax);
  }
  return scale_to_total_area(seed_detail::chain_from_radii(r, areas, d, segments_per_arc));
}

// ---------------------------------------------------------------------------
// Triple bubble

// Three lobes around a pinned central junction at the origin: straight inner
// interfaces, outer arcs meeting them at 120 degrees. Sector angles follow
// the area fractions.
inline Cluster triple_seed(const std::vector<double>& areas, DensityField d,
                           int segments_per_arc = kDefaultSegmentsPerArc) {
  if (areas.size() != 3) throw Error("triple_seed: need exactly three areas");
  seed_detail::require_positive(areas, "triple_seed");
  require_valid(d);
  const double total = seed_detail::total_target(areas);
  std::vector<double> sector(3);
  for (std::size_t i = 0; i < 3; ++i)
    sector[i] = std::clamp(2 * std::numbers::pi * areas[i] / total, 0.25 * std::numbers::pi, 0.9 * std::numbers::pi);
  const double norm_sum = sector[0] + sector[1] + sector[2];
  for (auto& s : sector) s *= 2 * std::numbers::pi / norm_sum;

  seed_detail::Builder b(d);
  std::vector<int> reg(3);
  for (std::size_t i = 0; i < 3; ++i) reg[i] = b.region(std::string(1, static_cast<char>('A' + i)), areas[i]);
  const int center = b.vertex({0.0, 0.0}, true);
  // Spoke k separates region k-1 (clockwise side) from region k.
  std::vector<double> spoke(3);
  spoke[0] = std::numbers::pi / 2 + sector[0] / 2;
  for (std::size_t k = 1; k < 3; ++k) spoke[k] = spoke[k - 1] + sector[k - 1];
  // Region k lies between spoke k and spoke k+1 (counterclockwise).
  std::vector<int> outer(3);
  for (std::size_t k = 0; k < 3; ++k) outer[k] = b.vertex(Point{std::cos(spoke[k]), std::sin(spoke[k])});
  const int seg = segments_per_arc;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<Point> pts;
    const Point tip = b.pos(outer[k]);
    for (int i = 1; i < seg; ++i) pts.push_back(tip * (static_cast<double>(i) / seg));
    // Spoke from the centre outward: region k on the left, k-1 on the right.
    b.arc(center, pts, outer[k], reg[k], reg[(k + 2) % 3]);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    // Outer arc of region k from spoke k to spoke k+1, bulging outward (to
    // the right of the walk). Leaving at 60 degrees off the spoke gives the
    // 120-degree junction.
    const double beta = sector[k];
    const int from = outer[k], to = outer[(k + 1) % 3];
    b.arc(from, seed_detail::arc_by_turn(b.pos(from), b.pos(to), -(std::numbers::pi / 6 + beta / 2), seg), to,
          reg[k], kExterior);
  }
  return scale_to_total_area(b.take());
}

// ---------------------------------------------------------------------------
// Quadruple bubble

enum class CentralEnd { west, east };

// Four lobes around a horizontal central edge, labelled clockwise from the
// top: north, east, south, west. `areas` lists the targets in that order.
// The chosen central-edge endpoint is pinned at the origin.
inline Cluster quadruple_seed(const std::vector<double>& areas, DensityField d, CentralEnd pinned = CentralEnd::west,
                              int segments_per_arc = kDefaultSegmentsPerArc) {
  if (areas.size() != 4) throw Error("quadruple_seed: need exactly four areas");
  seed_detail::require_positive(areas, "quadruple_seed");
  require_valid(d);
  constexpr double kPi = std::numbers::pi;
  // Half-length of the central edge that balances Euclidean areas for unit spokes.
  const double half = 0.344;
  const double m = 1.0;
  const double h = m * std::sqrt(3.0) / 2.0;
  const Point v1{-half, 0.0}, v2{half, 0.0};
  const Point pnw{-half - m / 2, h}, psw{-half - m / 2, -h};
  const Point pne{half + m / 2, h}, pse{half + m / 2, -h};
  const Point shift = pinned == CentralEnd::west ? -v1 : -v2;

  seed_detail::Builder b(d);
  const int rn = b.region("N", areas[0]);
  const int re = b.region("E", areas[1]);
  const int rs = b.region("S", areas[2]);
  const int rw = b.region("W", areas[3]);
  const int iv1 = b.vertex(v1 + shift, pinned == CentralEnd::west);
  const int iv2 = b.vertex(v2 + shift, pinned == CentralEnd::east);
  const int inw = b.vertex(pnw + shift), isw = b.vertex(psw + shift);
  const int ine = b.vertex(pne + shift), ise = b.vertex(pse + shift);
  const int seg = segments_per_arc;
  auto straight = [&](int from, int to) {
    std::vector<Point> pts;
    const Point a = b.pos(from), c = b.pos(to);
    for (int i = 1; i < seg; ++i) pts.push_back(a + (c - a) * (static_cast<double>(i) / seg));
    return pts;
  };
  auto curved = [&](int from, int to, double turn) { return seed_detail::arc_by_turn(b.pos(from), b.pos(to), turn, seg); };
  // Central edge west -> east: north on the left.
  b.arc(iv1, straight(iv1, iv2), iv2, rn, rs);
  b.arc(iv1, straight(iv1, inw), inw, rw, rn);
  b.arc(iv1, straight(iv1, isw), isw, rs, rw);
  b.arc(iv2, straight(iv2, ine), ine, rn, re);
  b.arc(iv2, straight(iv2, ise), ise, re, rs);
  // Outer arcs walked clockwise around the cluster keep the exterior on the
  // left; they bulge outward, i.e. to the left of the walk.
  b.arc(inw, curved(inw, ine, kPi / 3), ine, kExterior, rn);
  b.arc(ine, curved(ine, ise, kPi / 2), ise, kExterior, re);
  b.arc(ise, curved(ise, isw, kPi / 3), isw, kExterior, rs);
  b.arc(isw, curved(isw, inw, kPi / 2), inw, kExterior, rw);
  return scale_to_total_area(b.take());
}

}  // namespace bubbles
