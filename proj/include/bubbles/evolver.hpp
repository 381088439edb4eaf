#pragma once

// The minimization loop: projected descent with Armijo backtracking,
// interleaved refinement, topology transitions and p-continuation.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "bubbles/cluster.hpp"
#include "bubbles/energy.hpp"
#include "bubbles/errors.hpp"
#include "bubbles/hessian.hpp"
#include "bubbles/seeds.hpp"
#include "bubbles/surgery.hpp"

namespace bubbles {

enum class DescentDirection { gradient, newton };

struct EvolveConfig {
  double initial_step = 0.0;  // largest vertex displacement of a first trial step
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 30;
  double convergence_residual = 0.0;
  int max_iterations = 20000;
  double collapse_threshold_rel = 5e-4;
  int collapse_window = 20;  // accepted steps of monotone shrinking before a collapse
  std::vector<double> refinement_levels;
  int min_segments_per_arc = 8;
  double jiggle_amplitude = 0.0;
  double jiggle_noise = 0.0;
  unsigned long long rng_seed = 1;
  DescentDirection direction = DescentDirection::newton;
  bool transitions = true;
};

// Scale-aware defaults for a cluster at its current density.
inline EvolveConfig default_config(const Cluster& c) {
  EvolveConfig cfg;
  const double diam = diameter(c);
  double min_area = 0.0;
  for (const auto& r : c.regions)
    min_area = min_area == 0.0 ? r.target_weighted_area : std::min(min_area, r.target_weighted_area);
  cfg.initial_step = 0.1 * std::pow(std::max(min_area, 1e-300), 1.0 / (c.density.p + 2.0));
  const double perim = weighted_perimeter(c);
  cfg.convergence_residual = 1e-8 * perim / std::max(diam, 1e-300);
  cfg.refinement_levels = {diam / 16.0, diam / 64.0, diam / 256.0};
  return cfg;
}

struct TransitionEvent {
  enum class Kind { collapse, pop } kind;
  std::vector<int> edge_ids;  // collapse: the arc's edges
  int vertex_id = 0;          // pop: the vertex; collapse: surviving vertex
  double length = 0.0;        // collapse: arc length when proposed
  std::string describe() const {
    if (kind == Kind::pop) return "pop vertex " + std::to_string(vertex_id);
    std::string s = "collapse arc [";
    for (std::size_t i = 0; i < edge_ids.size(); ++i) s += (i ? "," : "") + std::to_string(edge_ids[i]);
    return s + "] length " + std::to_string(length);
  }
};

struct StepResult {
  double accepted_step = 0.0;
  double perimeter_before = 0.0;
  double perimeter_after = 0.0;
  double residual_norm = 0.0;
  double max_area_residual = 0.0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<TransitionEvent> transitions;
};

// State carried between steps of one stage: the current Newton damping.
struct StepMemory {
  double damping = 0.0;  // 0 = not yet calibrated
  void reset() { damping = 0.0; }
};

namespace evolve_detail {

// Largest step that moves no vertex more than half its shortest incident edge.
inline double displacement_cap(const Cluster& c, const std::vector<Point>& d) {
  const ClusterIndex idx(c);
  std::vector<double> shortest(c.vertices.size(), INFINITY);
  for (const auto& e : c.edges) {
    const std::size_t a = idx.v(e.tail), b = idx.v(e.head);
    const double len = distance(c.vertices[a].pos, c.vertices[b].pos);
    shortest[a] = std::min(shortest[a], len);
    shortest[b] = std::min(shortest[b], len);
  }
  double cap = INFINITY;
  for (std::size_t v = 0; v < d.size(); ++v) {
    const double m = norm(d[v]);
    if (m > 0.0) cap = std::min(cap, 0.5 * shortest[v] / m);
  }
  return cap;
}

inline double max_norm(const std::vector<Point>& d) {
  double m = 0.0;
  for (const auto& p : d) m = std::max(m, norm(p));
  return m;
}

inline double slope_along(const std::vector<Point>& d, const ProjectedGradient& pg) {
  double s = 0.0;
  for (std::size_t v = 0; v < d.size(); ++v) s -= dot(d[v], pg.direction[v]);
  return s;
}

// Tight projection used inside the line search.
inline std::optional<detail::ProjectionOutcome> tight_projection(const Cluster& c) {
  try {
    auto out = detail::project(c, 30, 1e-14, default_rule());
    if (out.residual > kAreaTolerance) return std::nullopt;
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Arcs whose shortest edge drops below this fraction of the mean are resampled.
inline constexpr double kEqualizeRatio = 0.1;

// Relative perimeter change below which floating-point noise dominates.
inline constexpr double kPerimeterNoise = 1e-13;

}  // namespace evolve_detail

// One descent step: a trial move along the chosen direction, re-projection
// onto the area constraints, and Armijo backtracking on the perimeter of the
// projected trial. The plain variant moves along the projected gradient; the
// Newton variant along the damped constrained Newton direction.
inline std::pair<Cluster, StepResult> step(const Cluster& c, const EvolveConfig& cfg,
                                           StepMemory* memory = nullptr) {
  using namespace evolve_detail;
  StepResult res;
  const EnergyState s = evaluate(c);
  const ProjectedGradient pg = projected_gradient(c, s);
  res.perimeter_before = res.perimeter_after = s.perimeter;
  res.residual_norm = pg.residual_norm;
  res.max_area_residual = max_area_residual(c, s.areas);
  if (pg.residual_norm < cfg.convergence_residual) {
    res.converged = true;
    return {c, res};
  }

  auto line_search = [&](const std::vector<Point>& dir, double alpha, int max_backtracks,
                         bool allow_noise) -> std::optional<std::pair<Cluster, double>> {
    const double slope = slope_along(dir, pg);
    alpha = std::min(alpha, displacement_cap(c, dir));
    for (int k = 0; k <= max_backtracks; ++k, alpha *= cfg.backtrack_factor) {
      Cluster trial = c;
      for (std::size_t v = 0; v < trial.vertices.size(); ++v) trial.vertices[v].pos += dir[v] * alpha;
      auto projected = tight_projection(trial);
      if (!projected) continue;
      double perim = 0.0;
      try {
        perim = weighted_perimeter(projected->cluster);
      } catch (const ZeroLengthError&) {
        continue;
      }
      bool ok = perim <= s.perimeter + cfg.armijo_c * alpha * slope;
      if (!ok && allow_noise && k == 0 && perim <= s.perimeter * (1.0 + kPerimeterNoise)) {
        // Within rounding of the current perimeter: accept if the residual drops.
        try {
          ok = projected_gradient(projected->cluster).residual_norm < pg.residual_norm;
        } catch (const Error&) {
          ok = false;
        }
      }
      if (ok) {
        res.accepted_step = alpha;
        res.perimeter_after = perim;
        res.max_area_residual = projected->residual;
        return std::make_pair(std::move(projected->cluster), perim);
      }
    }
    return std::nullopt;
  };

  if (cfg.direction == DescentDirection::newton) {
    const DofMap dofs(c);
    const LagrangianHessian lh = lagrangian_hessian(c, pg.multipliers, dofs);
    // Damping scale: ratio of Hessian to mass diagonals.
    double hd = 0.0, md = 0.0;
    for (int i = 0; i < dofs.count; ++i) {
      hd += std::abs(lh.hessian.coeff(i, i));
      md += lh.mass[i];
    }
    const double mu_scale = md > 0.0 ? hd / md : 1.0;
    const double mu_floor = 1e-6 * mu_scale;
    double mu = memory && memory->damping > 0.0 ? memory->damping : mu_floor;
    for (int attempt = 0; attempt < 12; ++attempt) {
      auto dir = damped_newton_direction(c, s, pg, lh, dofs, mu);
      if (dir) {
        auto accepted = line_search(*dir, 1.0, 6, true);
        if (accepted) {
          // Full steps relax the damping, short ones tighten it.
          if (res.accepted_step >= 0.99)
            mu = std::max(mu_floor, 0.25 * mu);
          else if (res.accepted_step < 0.5)
            mu = std::max(mu_scale * 1e-4, 4.0 * mu);
          if (memory) memory->damping = mu;
          return {std::move(accepted->first), res};
        }
      }
      mu = std::max(mu_scale * 1e-6, 16.0 * mu);
    }
    if (memory) memory->reset();
    // Fall through to a plain gradient step.
  }

  const double dmax = max_norm(pg.direction);
  if (dmax == 0.0) {
    res.line_search_failed = true;
    return {c, res};
  }
  if (auto accepted = line_search(pg.direction, cfg.initial_step / dmax, cfg.max_backtracks, false))
    return {std::move(accepted->first), res};
  res.line_search_failed = true;
  return {c, res};
}

// ---------------------------------------------------------------------------
// Transition detection

// Remembers junction-to-junction arc lengths over accepted steps. Arcs are
// keyed by their end junctions and side labels, which survive refinement.
class TransitionTracker {
 public:
  using Key = std::tuple<int, int, int, int>;

  void record(const Cluster& c) {
    const ClusterIndex idx(c);
    std::map<Key, double> now;
    for (const auto& arc : extract_arcs(c)) {
      if (arc.closed) continue;
      now[key(arc)] = arc_euclidean_length(c, idx, arc);
    }
    for (auto it = history_.begin(); it != history_.end();) {
      if (!now.count(it->first))
        it = history_.erase(it);
      else
        ++it;
    }
    for (const auto& [k, len] : now) {
      auto& h = history_[k];
      h.push_back(len);
      if (h.size() > 256) h.pop_front();
    }
  }
  void reset() { history_.clear(); }

  // True when the arc has at least `window` + 1 samples and shrank at each
  // of the last `window` of them.
  bool shrinking(const Arc& arc, int window) const {
    auto it = history_.find(key(arc));
    if (it == history_.end()) return false;
    const auto& h = it->second;
    if (static_cast<int>(h.size()) < window + 1) return false;
    for (std::size_t i = h.size() - static_cast<std::size_t>(window); i < h.size(); ++i)
      if (!(h[i] < h[i - 1])) return false;
    return true;
  }

  static Key key(const Arc& arc) {
    int a = arc.first(), b = arc.last();
    int l = arc.left_region, r = arc.right_region;
    if (a > b) {
      std::swap(a, b);
      std::swap(l, r);
    }
    return {a, b, l, r};
  }

 private:
  std::map<Key, std::deque<double>> history_;
};

// Proposals only: collapse for short, steadily shrinking junction-to-junction
// arcs, pop for valence-4 vertices away from the origin.
inline std::vector<TransitionEvent> detect_transitions(const Cluster& c, const EvolveConfig& cfg,
                                                       const TransitionTracker& tracker) {
  std::vector<TransitionEvent> out;
  const ClusterIndex idx(c);
  const auto inc = incidence(c);
  const double diam = diameter(c);
  const double eps_origin = 1e-6 * diam;
  for (const auto& arc : extract_arcs(c)) {
    if (arc.closed || arc.first() == arc.last()) continue;
    if (inc.at(arc.first()).size() < 3 || inc.at(arc.last()).size() < 3) continue;
    const double len = arc_euclidean_length(c, idx, arc);
    if (len >= cfg.collapse_threshold_rel * diam) continue;
    if (!tracker.shrinking(arc, cfg.collapse_window)) continue;
    out.push_back({TransitionEvent::Kind::collapse, arc.edge_ids, 0, len});
  }
  for (const auto& v : c.vertices) {
    if (inc.at(v.id).size() == 4 && norm(v.pos) > eps_origin)
      out.push_back({TransitionEvent::Kind::pop, {}, v.id, 0.0});
  }
  return out;
}

// Collapses every edge of an arc in turn, merging its end junctions.
inline Cluster collapse_arc(const Cluster& c, const std::vector<int>& edge_ids, int* survivor = nullptr) {
  Cluster out = c;
  int last_vertex = 0;
  for (int eid : edge_ids) {
    const ClusterIndex idx(out);
    if (!idx.edge.count(eid)) continue;
    const Edge e = out.edges[idx.e(eid)];
    out = collapse_edge(out, eid);
    const ClusterIndex after(out);
    last_vertex = after.vertex.count(e.tail) ? e.tail : e.head;
  }
  if (survivor) *survivor = last_vertex;
  return out;
}

// ---------------------------------------------------------------------------
// Runner

struct LogRecord {
  int stage = 0;
  double p = 0.0;
  double level = 0.0;  // current max segment length
  int iteration = 0;   // global, across stages
  double perimeter = 0.0;
  double max_area_residual = 0.0;
  double residual_norm = 0.0;
  double step = 0.0;
  std::vector<std::string> events;
  std::optional<Cluster> snapshot;
};

struct StageSummary {
  double p = 0.0;
  double perimeter = 0.0;
  std::vector<double> areas;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool topology_limited = false;  // stopped where a withheld collapse would be needed
  std::vector<std::string> warnings;
  std::optional<Cluster> cluster;  // converged state at the end of the stage
};

struct RunLog {
  std::vector<LogRecord> records;
  std::vector<StageSummary> stages;
  std::vector<std::string> warnings;
};

struct Schedule {
  std::vector<double> p_path;
  // Per-stage overrides, keyed by index into p_path.
  std::map<std::size_t, EvolveConfig> overrides;
  double max_p_increment = 0.25;
  int snapshot_every = 0;  // 0 = no snapshots in the log
};

namespace evolve_detail {

inline double mean_edge_length(const Cluster& c) {
  const ClusterIndex idx(c);
  double s = 0.0;
  for (const auto& e : c.edges) s += distance(c.vertices[idx.v(e.tail)].pos, c.vertices[idx.v(e.head)].pos);
  return c.edges.empty() ? 0.0 : s / static_cast<double>(c.edges.size());
}

// Refines so that every edge is at most `level` long and every arc has at
// least `min_segments` edges.
inline Cluster refine_arcs(const Cluster& c, double level, int min_segments) {
  Cluster out = refine(c, level);
  for (int pass = 0; pass < 8; ++pass) {
    const ClusterIndex idx(out);
    std::vector<int> to_split;
    for (const auto& arc : extract_arcs(out)) {
      if (static_cast<int>(arc.edge_ids.size()) >= min_segments) continue;
      for (int eid : arc.edge_ids) to_split.push_back(eid);
    }
    if (to_split.empty()) break;
    // Halve the edges of under-resolved arcs.
    Cluster next = out;
    next.edges.clear();
    int next_v = out.next_vertex_id(), next_e = out.next_edge_id();
    std::vector<Edge> appended;
    std::sort(to_split.begin(), to_split.end());
    for (const auto& e : out.edges) {
      if (!std::binary_search(to_split.begin(), to_split.end(), e.id)) {
        next.edges.push_back(e);
        continue;
      }
      const Point a = out.vertices[idx.v(e.tail)].pos, b = out.vertices[idx.v(e.head)].pos;
      const int mid = next_v++;
      next.vertices.push_back({mid, (a + b) * 0.5, false});
      next.edges.push_back({e.id, e.tail, mid, e.left_region, e.right_region});
      appended.push_back({next_e++, mid, e.head, e.left_region, e.right_region});
    }
    next.edges.insert(next.edges.end(), appended.begin(), appended.end());
    out = std::move(next);
  }
  return out;
}

// Removes valence-2 vertices on edges much shorter than the level, but only
// on arcs that keep at least min_segments edges.
inline Cluster coarsen_arcs(const Cluster& c, double min_length, int min_segments) {
  Cluster out = c;
  for (int pass = 0; pass < 64; ++pass) {
    const ClusterIndex idx(out);
    const auto inc = incidence(out);
    std::optional<int> victim;
    double best = min_length;
    for (const auto& arc : extract_arcs(out)) {
      if (static_cast<int>(arc.edge_ids.size()) <= min_segments) continue;
      for (int eid : arc.edge_ids) {
        const Edge& e = out.edges[idx.e(eid)];
        const double len = distance(out.vertices[idx.v(e.tail)].pos, out.vertices[idx.v(e.head)].pos);
        if (len >= best) continue;
        const bool tail2 = inc.at(e.tail).size() == 2 && !out.vertices[idx.v(e.tail)].pinned_to_origin;
        const bool head2 = inc.at(e.head).size() == 2 && !out.vertices[idx.v(e.head)].pinned_to_origin;
        if (!tail2 && !head2) continue;
        best = len;
        victim = eid;
      }
    }
    if (!victim) break;
    try {
      out = collapse_edge(out, *victim);
    } catch (const SurgeryError&) {
      break;
    }
  }
  return out;
}

// Redistributes the interior vertices of every arc whose shortest edge has
// fallen below `ratio` times its mean edge, at equal Euclidean spacing along
// the current polyline. Returns true when anything moved.
inline bool equalize_arcs(Cluster& c, double ratio) {
  const ClusterIndex idx(c);
  bool changed = false;
  for (const auto& arc : extract_arcs(c)) {
    const std::size_t n = arc.edge_ids.size();
    if (n < 2) continue;
    auto pts = arc_points(c, idx, arc);
    if (arc.closed) pts.push_back(pts.front());
    std::vector<double> cum(pts.size(), 0.0);
    double shortest = INFINITY;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double len = distance(pts[i - 1], pts[i]);
      shortest = std::min(shortest, len);
      cum[i] = cum[i - 1] + len;
    }
    const double mean = cum.back() / static_cast<double>(n);
    if (shortest >= ratio * mean) continue;
    std::size_t seg = 1;
    for (std::size_t k = 1; k < n; ++k) {
      const double target = mean * static_cast<double>(k);
      while (seg + 1 < pts.size() && cum[seg] < target) ++seg;
      const double t = (target - cum[seg - 1]) / (cum[seg] - cum[seg - 1]);
      const int vid = arc.vertex_ids[k];
      auto& v = c.vertices[idx.v(vid)];
      if (v.pinned_to_origin) continue;
      v.pos = pts[seg - 1] + (pts[seg] - pts[seg - 1]) * t;
    }
    changed = true;
  }
  return changed;
}

}  // namespace evolve_detail

// Applies the proposals that are legal; returns the events actually applied.
inline std::vector<TransitionEvent> apply_transitions(Cluster& c, const std::vector<TransitionEvent>& proposals) {
  std::vector<TransitionEvent> applied;
  for (const auto& p : proposals) {
    try {
      Cluster next;
      TransitionEvent ev = p;
      if (p.kind == TransitionEvent::Kind::collapse) {
        int survivor = 0;
        next = collapse_arc(c, p.edge_ids, &survivor);
        ev.vertex_id = survivor;
        // A new valence-4 vertex away from the origin is popped straight away.
        const auto inc = incidence(next);
        const ClusterIndex idx(next);
        if (inc.at(survivor).size() == 4 && norm(next.vertices[idx.v(survivor)].pos) > origin_radius(next))
          next = pop_vertex(next, survivor);
      } else {
        next = pop_vertex(c, p.vertex_id);
      }
      if (!validate(next).empty()) continue;
      c = std::move(next);
      applied.push_back(ev);
    } catch (const Error&) {
      continue;
    }
  }
  return applied;
}

// Evolves a cluster through the schedule. `base` supplies the configuration
// for every stage that has no override; when omitted, scale-aware defaults
// are derived from the seed.
inline std::pair<Cluster, RunLog> run(const Cluster& seed, const Schedule& schedule,
                                      std::optional<EvolveConfig> base = std::nullopt,
                                      const std::function<void(const LogRecord&)>& on_record = {}) {
  using namespace evolve_detail;
  if (schedule.p_path.empty()) throw Error("run: empty p_path");
  for (double p : schedule.p_path)
    if (!(p >= 0.0)) throw Error("run: density exponents must be >= 0");
  if (auto v = validate(seed); !v.empty()) throw ValidationError("run: invalid seed: " + describe(v));

  Cluster c = seed;
  const EvolveConfig seed_cfg = base ? *base : default_config(seed);
  RunLog log;
  int global_iter = 0;

  if (seed_cfg.jiggle_amplitude > 0.0 || seed_cfg.jiggle_noise > 0.0) {
    std::mt19937_64 rng(seed_cfg.rng_seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (auto& v : c.vertices) {
      if (v.pinned_to_origin) continue;
      v.pos.y += seed_cfg.jiggle_amplitude;
      if (seed_cfg.jiggle_noise > 0.0) {
        v.pos.x += seed_cfg.jiggle_noise * noise(rng);
        v.pos.y += seed_cfg.jiggle_noise * noise(rng);
      }
    }
  }

  auto emit = [&](LogRecord rec) {
    if (schedule.snapshot_every > 0 && rec.iteration % schedule.snapshot_every == 0) rec.snapshot = c;
    if (on_record) on_record(rec);
    log.records.push_back(std::move(rec));
  };

  // Re-establishes the area constraints after a density change or seeding,
  // ramping the targets geometrically when they are far away.
  auto establish = [&](const EvolveConfig& cfg, int stage, double p) {
    c = scale_to_total_area(c);
    auto areas = weighted_areas(c);
    std::vector<double> goal;
    double worst = 0.0;
    for (std::size_t i = 0; i < areas.size(); ++i) {
      goal.push_back(c.regions[i].target_weighted_area);
      worst = std::max(worst, std::abs(std::log(goal[i] / areas[i])));
    }
    const int ramps = std::max(1, static_cast<int>(std::ceil(worst / std::log(1.25))));
    const std::vector<double> start = areas;
    for (int k = 1; k <= ramps; ++k) {
      const double s = static_cast<double>(k) / ramps;
      for (std::size_t i = 0; i < goal.size(); ++i)
        c.regions[i].target_weighted_area = std::exp((1 - s) * std::log(start[i]) + s * std::log(goal[i]));
      c = project_to_constraints(c);
      if (k == ramps) break;
      // Relax the shape a little at each intermediate target.
      StepMemory mem;
      for (int it = 0; it < 200; ++it) {
        auto [next, res] = step(c, cfg, &mem);
        c = std::move(next);
        if (res.converged || res.line_search_failed) break;
      }
      LogRecord rec;
      rec.stage = stage;
      rec.p = p;
      rec.iteration = global_iter++;
      rec.perimeter = weighted_perimeter(c);
      rec.events.push_back("area ramp " + std::to_string(k) + "/" + std::to_string(ramps));
      emit(std::move(rec));
    }
  };

  // Sub-stage exponents honouring the continuation increment.
  std::vector<std::pair<std::size_t, double>> stages;
  double p_now = c.density.p;
  for (std::size_t i = 0; i < schedule.p_path.size(); ++i) {
    const double target = schedule.p_path[i];
    const int pieces = static_cast<int>(std::ceil(std::abs(target - p_now) / schedule.max_p_increment - 1e-9));
    const double from = p_now;
    for (int k = 1; k <= pieces; ++k) {
      p_now = k == pieces ? target : from + (target - from) * k / pieces;
      stages.emplace_back(i, p_now);
    }
    if (stages.empty() || stages.back().first != i) stages.emplace_back(i, target);
  }

  bool first = true;
  for (const auto& [stage_index, p] : stages) {
    EvolveConfig cfg = seed_cfg;
    if (auto it = schedule.overrides.find(stage_index); it != schedule.overrides.end()) cfg = it->second;
    c.density.p = p;
    const int stage = static_cast<int>(stage_index);
    try {
      establish(cfg, stage, p);
    } catch (const Error& e) {
      throw Error("run: stage " + std::to_string(stage) + " (p=" + std::to_string(p) +
                  "): constraint projection failed: " + e.what());
    }
    if (first) {
      LogRecord rec;
      rec.stage = stage;
      rec.p = p;
      rec.iteration = global_iter++;
      rec.perimeter = weighted_perimeter(c);
      rec.events.push_back("seed projected");
      emit(std::move(rec));
      first = false;
    }
    StageSummary summary;
    summary.p = p;
    const double diam0 = diameter(c);
    const double conv = cfg.convergence_residual > 0.0
                            ? cfg.convergence_residual
                            : 1e-8 * weighted_perimeter(c) / std::max(diam0, 1e-300);
    std::vector<double> levels = cfg.refinement_levels;
    if (levels.empty()) levels = {diam0 / 16.0, diam0 / 64.0, diam0 / 256.0};

    TransitionTracker tracker;
    for (double level : levels) {
      c = refine_arcs(c, level, cfg.min_segments_per_arc);
      c = coarsen_arcs(c, level / 8.0, cfg.min_segments_per_arc);
      c = project_to_constraints(c);
      EvolveConfig lc = cfg;
      lc.convergence_residual = conv;
      if (lc.initial_step <= 0.0) lc.initial_step = 0.1 * level;
      StepMemory mem;
      tracker.reset();
      bool converged = false;
      int retries = 0;
      for (int it = 0; it < cfg.max_iterations; ++it) {
        auto [next, res] = step(c, lc, &mem);
        c = std::move(next);
        LogRecord rec;
        rec.stage = stage;
        rec.p = p;
        rec.level = level;
        rec.iteration = global_iter++;
        rec.perimeter = res.perimeter_after;
        rec.max_area_residual = res.max_area_residual;
        rec.residual_norm = res.residual_norm;
        rec.step = res.accepted_step;
        summary.residual_norm = res.residual_norm;
        ++summary.iterations;
        if (res.converged) {
          converged = true;
          emit(std::move(rec));
          break;
        }
        if (res.line_search_failed) {
          if (retries++ < 2) {
            mem.reset();
            emit(std::move(rec));
            continue;
          }
          rec.events.push_back("line search stagnated");
          emit(std::move(rec));
          summary.warnings.push_back("stage " + std::to_string(stage) + " p=" + std::to_string(p) +
                                     ": line search stagnated at residual " + std::to_string(res.residual_norm));
          break;
        }
        retries = 0;
        if (equalize_arcs(c, kEqualizeRatio)) {
          c = project_to_constraints(c);
          mem.reset();
          rec.events.push_back("arc spacing equalized");
        }
        tracker.record(c);
        if (!cfg.transitions) {
          const auto proposals = detect_transitions(c, cfg, tracker);
          const bool limit = std::any_of(proposals.begin(), proposals.end(), [](const TransitionEvent& t) {
            return t.kind == TransitionEvent::Kind::collapse;
          });
          if (limit) {
            rec.events.push_back("topology limit: " + proposals.front().describe() + " withheld");
            emit(std::move(rec));
            summary.topology_limited = true;
            break;
          }
        } else {
          const auto proposals = detect_transitions(c, cfg, tracker);
          if (!proposals.empty()) {
            const auto applied = apply_transitions(c, proposals);
            if (!applied.empty()) {
              for (const auto& ev : applied) rec.events.push_back(ev.describe());
              c = refine_arcs(c, level, cfg.min_segments_per_arc);
              c = project_to_constraints(c);
              mem.reset();
              tracker.reset();
            }
          }
        }
        emit(std::move(rec));
      }
      summary.converged = converged;
    }
    const auto s = evaluate(c);
    summary.perimeter = s.perimeter;
    summary.areas = s.areas;
    summary.cluster = c;
    for (const auto& w : summary.warnings) log.warnings.push_back(w);
    log.stages.push_back(std::move(summary));
  }
  return {c, log};
}

}  // namespace bubbles
