#pragma once

// Post-convergence checks and comparisons: junction angles, per-arc circle
// fits with generalized-curvature constancy, perimeter tables and shape
// distances.
//
// Sign convention: kappa_f is measured with the normal pointing into the
// arc's left region.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"
#include "bubbles/errors.hpp"
#include "bubbles/geometry.hpp"

namespace bubbles {

struct Tolerances {
  double angle_deg = 0.5;
  double constancy = 1e-2;
  double circle_rms_rel = 1e-3;
  double through_origin = 1e-2;
  double origin_spacings = 3.0;  // kappa_f samples nearer the origin are skipped
};

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

namespace analyze_detail {

// Unit tangent leaving p0 along the arc p0 -> p1 -> p2, from the circle
// through the three points (the chord when they are collinear).
inline Point leaving_tangent(Point p0, Point p1, std::optional<Point> p2) {
  const Point chord = (p1 - p0) / norm(p1 - p0);
  if (!p2) return chord;
  const Point a = p1 - p0, b = *p2 - p0;
  const double denom = 2.0 * cross(a, b);
  const double scale = norm(a) * norm(b);
  if (std::abs(denom) <= 1e-12 * scale) return chord;
  const double aa = norm2(a), bb = norm2(b);
  const Point center{(b.y * aa - a.y * bb) / denom, (a.x * bb - b.x * aa) / denom};  // relative to p0
  Point t = perp(center / norm(center));
  if (dot(t, chord) < 0) t = -t;
  return t;
}

}  // namespace analyze_detail

// Incident angles (degrees) at every vertex of valence >= 3, counterclockwise
// from the smallest direction angle. They sum to 360.
inline std::map<int, std::vector<double>> junction_angles(const Cluster& c) {
  const ClusterIndex idx(c);
  const auto inc = incidence(c);
  std::map<int, std::vector<double>> out;
  std::map<int, std::vector<double>> dirs;
  for (const auto& arc : extract_arcs(c)) {
    if (arc.closed) continue;
    const auto pts = arc_points(c, idx, arc);
    const std::size_t n = pts.size();
    auto third = [&](std::size_t i) -> std::optional<Point> {
      return n >= 3 ? std::optional<Point>(pts[i]) : std::nullopt;
    };
    if (inc.at(arc.first()).size() >= 3) {
      const Point t = analyze_detail::leaving_tangent(pts[0], pts[1], third(2));
      dirs[arc.first()].push_back(std::atan2(t.y, t.x));
    }
    if (inc.at(arc.last()).size() >= 3) {
      const Point t = analyze_detail::leaving_tangent(pts[n - 1], pts[n - 2], third(n - 3));
      dirs[arc.last()].push_back(std::atan2(t.y, t.x));
    }
  }
  for (auto& [vid, a] : dirs) {
    std::sort(a.begin(), a.end());
    std::vector<double> angles;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) angles.push_back((a[i + 1] - a[i]) * kRadToDeg);
    angles.push_back((a.front() + 2 * std::numbers::pi - a.back()) * kRadToDeg);
    out[vid] = std::move(angles);
  }
  return out;
}

// Vertices where the density vanishes are exempt from the 120-degree rule,
// as are vertices closer to the origin than `origin_spacings` times their
// longest incident edge.
inline bool angle_exempt(const Cluster& c, const Vertex& v, double origin_spacings = Tolerances{}.origin_spacings) {
  if (c.density.p <= 0.0) return false;
  const double r = norm(v.pos);
  if (origin_spacings > 0.0) {
    const ClusterIndex idx(c);
    double longest = 0.0;
    for (const auto& e : c.edges)
      if (e.tail == v.id || e.head == v.id)
        longest = std::max(longest, distance(c.vertices[idx.v(e.tail)].pos, c.vertices[idx.v(e.head)].pos));
    if (r < origin_spacings * longest) return true;
  }
  return r <= origin_radius(c);
}

struct AngleViolation {
  int vertex_id = 0;
  std::vector<double> angles;
  double worst_deviation = 0.0;
};

inline std::vector<AngleViolation> angle_violations(const Cluster& c,
                                                    const std::map<int, std::vector<double>>& angles,
                                                    double tolerance_deg,
                                                    double origin_spacings = Tolerances{}.origin_spacings) {
  const ClusterIndex idx(c);
  std::vector<AngleViolation> out;
  for (const auto& [vid, a] : angles) {
    if (angle_exempt(c, c.vertices[idx.v(vid)], origin_spacings)) continue;
    double worst = 0.0;
    for (double x : a) worst = std::max(worst, std::abs(x - 120.0));
    if (a.size() != 3) worst = std::max(worst, 360.0);
    if (worst > tolerance_deg) out.push_back({vid, a, worst});
  }
  return out;
}

struct ArcReport {
  std::vector<int> vertex_ids;
  int left_region = kExterior;
  int right_region = kExterior;
  bool straight = false;  // collinear samples; no finite circle
  CircleFit fit;          // radius is +inf for straight arcs
  double rms_rel = 0.0;   // rms residual / radius (or / length when straight)
  double through_origin_residual = 0.0;
  double kappa_mean = 0.0;
  double kappa_stddev = 0.0;
  double constancy_defect = 0.0;
  bool circular_through_origin = false;
  std::optional<std::string> error;  // e.g. too few samples
};

// Per-arc circle fit and generalized-curvature statistics. The constancy
// defect is stddev / max(|mean|, 1 / diameter).
inline std::vector<ArcReport> arc_regularity(const Cluster& c, const Tolerances& tol = {}) {
  const ClusterIndex idx(c);
  const double diam = diameter(c);
  std::vector<ArcReport> out;
  for (const auto& arc : extract_arcs(c)) {
    ArcReport rep;
    rep.vertex_ids = arc.vertex_ids;
    rep.left_region = arc.left_region;
    rep.right_region = arc.right_region;
    auto pts = arc_points(c, idx, arc);
    if (arc.closed) pts.push_back(pts.front());
    double length = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) length += distance(pts[i - 1], pts[i]);
    try {
      rep.fit = fit_circle(pts);
      rep.rms_rel = rep.fit.rms_residual / rep.fit.radius;
      rep.through_origin_residual = rep.fit.through_origin_residual;
    } catch (const CollinearError&) {
      rep.straight = true;
      const Point dir = (pts.back() - pts.front()) / norm(pts.back() - pts.front());
      double ss = 0.0;
      for (const auto& q : pts) ss += std::pow(cross(dir, q - pts.front()), 2);
      rep.fit.radius = std::numeric_limits<double>::infinity();
      rep.fit.center = pts.front();
      rep.fit.rms_residual = std::sqrt(ss / static_cast<double>(pts.size()));
      rep.rms_rel = rep.fit.rms_residual / length;
      // A line is a circle through the origin when it passes through it.
      rep.through_origin_residual = std::abs(cross(dir, -pts.front())) / diam;
      rep.fit.through_origin_residual = rep.through_origin_residual;
    } catch (const InsufficientSamplesError& e) {
      rep.error = e.what();
    }
    try {
      const auto k = generalized_curvature_samples(pts, NormalSide::left, c.density, tol.origin_spacings);
      if (k.empty()) throw InsufficientSamplesError("arc_regularity: no usable samples");
      double mean = 0.0;
      for (double x : k) mean += x;
      mean /= static_cast<double>(k.size());
      double var = 0.0;
      for (double x : k) var += (x - mean) * (x - mean);
      rep.kappa_mean = mean;
      rep.kappa_stddev = std::sqrt(var / static_cast<double>(k.size()));
      rep.constancy_defect = rep.kappa_stddev / std::max(std::abs(mean), 1.0 / diam);
    } catch (const Error& e) {
      if (!rep.error) rep.error = e.what();
    }
    rep.circular_through_origin =
        !rep.error && rep.rms_rel < tol.circle_rms_rel && rep.through_origin_residual < tol.through_origin;
    out.push_back(std::move(rep));
  }
  return out;
}

struct RegularityReport {
  std::map<int, std::vector<double>> junction_angles;
  std::vector<AngleViolation> angle_violations;
  std::vector<ArcReport> arcs;
  double perimeter = 0.0;
  std::map<int, double> areas;
  double residual_norm = 0.0;
  Tolerances tolerances;

  std::vector<const ArcReport*> constancy_failures() const {
    std::vector<const ArcReport*> out;
    for (const auto& a : arcs)
      if (a.error || a.constancy_defect >= tolerances.constancy) out.push_back(&a);
    return out;
  }
  bool passed() const { return angle_violations.empty() && constancy_failures().empty(); }
};

inline RegularityReport regularity_report(const Cluster& c, const Tolerances& tol = {}) {
  RegularityReport r;
  r.tolerances = tol;
  r.junction_angles = junction_angles(c);
  r.angle_violations = angle_violations(c, r.junction_angles, tol.angle_deg, tol.origin_spacings);
  r.arcs = arc_regularity(c, tol);
  const EnergyState s = evaluate(c);
  r.perimeter = s.perimeter;
  for (std::size_t i = 0; i < c.regions.size(); ++i) r.areas[c.regions[i].id] = s.areas[i];
  r.residual_norm = projected_gradient(c, s).residual_norm;
  return r;
}

// ---------------------------------------------------------------------------
// Comparisons

struct RunSummary {
  std::string name;
  double p = 0.0;
  double perimeter = 0.0;
  std::vector<double> target_areas;
};

struct ComparisonTable {
  std::vector<RunSummary> runs;
  std::vector<std::vector<double>> differences;  // [i][j] = P_i - P_j
  std::size_t winner = 0;
};

inline ComparisonTable compare(const std::vector<RunSummary>& runs) {
  if (runs.size() < 2) throw IncomparableRunsError("compare: need at least two runs");
  auto sorted = [](std::vector<double> a) {
    std::sort(a.begin(), a.end());
    return a;
  };
  const auto ref = sorted(runs[0].target_areas);
  for (const auto& r : runs) {
    if (r.p != runs[0].p)
      throw IncomparableRunsError("compare: runs '" + runs[0].name + "' and '" + r.name +
                                  "' use different density exponents");
    const auto a = sorted(r.target_areas);
    bool same = a.size() == ref.size();
    for (std::size_t i = 0; same && i < a.size(); ++i)
      same = std::abs(a[i] - ref[i]) <= 1e-9 * std::max(std::abs(a[i]), std::abs(ref[i]));
    if (!same)
      throw IncomparableRunsError("compare: runs '" + runs[0].name + "' and '" + r.name +
                                  "' have different target areas");
  }
  ComparisonTable t;
  t.runs = runs;
  t.differences.assign(runs.size(), std::vector<double>(runs.size(), 0.0));
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = 0; j < runs.size(); ++j) t.differences[i][j] = runs[i].perimeter - runs[j].perimeter;
    if (runs[i].perimeter < runs[t.winner].perimeter) t.winner = i;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Shape distance

inline double point_segment_distance(Point q, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = norm2(ab);
  const double t = len2 > 0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(q, a + ab * t);
}

namespace analyze_detail {

inline std::vector<std::pair<Point, Point>> segments(const Cluster& c) {
  const ClusterIndex idx(c);
  std::vector<std::pair<Point, Point>> out;
  for (const auto& e : c.edges) out.emplace_back(c.vertices[idx.v(e.tail)].pos, c.vertices[idx.v(e.head)].pos);
  return out;
}

inline double directed_hausdorff(const std::vector<std::pair<Point, Point>>& from,
                                 const std::vector<std::pair<Point, Point>>& to, int samples_per_segment) {
  double worst = 0.0;
  for (const auto& [a, b] : from) {
    for (int k = 0; k <= samples_per_segment; ++k) {
      const Point q = a + (b - a) * (static_cast<double>(k) / samples_per_segment);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [u, v] : to) best = std::min(best, point_segment_distance(q, u, v));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace analyze_detail

// Symmetric Hausdorff distance between the edge sets of two clusters,
// sampling each edge at its endpoints and `samples_per_segment - 1` interior
// points.
inline double hausdorff_distance(const Cluster& a, const Cluster& b, int samples_per_segment = 4) {
  const auto sa = analyze_detail::segments(a), sb = analyze_detail::segments(b);
  return std::max(analyze_detail::directed_hausdorff(sa, sb, samples_per_segment),
                  analyze_detail::directed_hausdorff(sb, sa, samples_per_segment));
}

// Rotates `b` about the origin so that its junction farthest from the origin
// points the same way as that of `a`, then measures hausdorff_distance. Both
// clusters need a junction (valence >= 3) away from the origin.
inline double junction_aligned_hausdorff(const Cluster& a, const Cluster& b, int samples_per_segment = 4) {
  auto far_junction = [](const Cluster& c) {
    const auto inc = incidence(c);
    std::optional<Point> best;
    for (const auto& v : c.vertices)
      if (inc.at(v.id).size() >= 3 && (!best || norm(v.pos) > norm(*best))) best = v.pos;
    if (!best || norm(*best) <= origin_radius(c))
      throw Error("junction_aligned_hausdorff: no junction away from the origin");
    return *best;
  };
  const Point ja = far_junction(a), jb = far_junction(b);
  const double turn = std::atan2(ja.y, ja.x) - std::atan2(jb.y, jb.x);
  const double cs = std::cos(turn), sn = std::sin(turn);
  Cluster rotated = b;
  for (auto& v : rotated.vertices) v.pos = {cs * v.pos.x - sn * v.pos.y, sn * v.pos.x + cs * v.pos.y};
  return hausdorff_distance(a, rotated, samples_per_segment);
}

// ---------------------------------------------------------------------------
// Topology summaries

// Junctions none of whose incident edges touch the exterior.
inline std::vector<int> inner_junctions(const Cluster& c) {
  const ClusterIndex idx(c);
  std::vector<int> out;
  for (const auto& [vid, edges] : incidence(c)) {
    if (edges.size() < 3) continue;
    const bool inner = std::none_of(edges.begin(), edges.end(), [&](int eid) {
      const Edge& e = c.edges[idx.e(eid)];
      return e.left_region == kExterior || e.right_region == kExterior;
    });
    if (inner) out.push_back(vid);
  }
  return out;
}

// Arcs joining two distinct inner junctions, shortest first.
inline std::vector<Arc> central_arcs(const Cluster& c) {
  const auto inner = inner_junctions(c);
  auto is_inner = [&](int vid) { return std::find(inner.begin(), inner.end(), vid) != inner.end(); };
  const ClusterIndex idx(c);
  std::vector<std::pair<double, Arc>> found;
  for (auto& arc : extract_arcs(c))
    if (!arc.closed && arc.first() != arc.last() && is_inner(arc.first()) && is_inner(arc.last()))
      found.emplace_back(arc_euclidean_length(c, idx, arc), std::move(arc));
  std::stable_sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Arc> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

// Valence of the vertex within origin_radius of the origin, 0 when there is none.
inline std::size_t origin_valence(const Cluster& c) {
  const auto inc = incidence(c);
  const double eps = origin_radius(c);
  for (const auto& v : c.vertices)
    if (norm(v.pos) <= eps) return inc.at(v.id).size();
  return 0;
}

}  // namespace bubbles
