#pragma once

// Experiment configurations and runs: seeds by name, schedules, checks, and
// the out/<name>/ artifacts (summary.json, cluster.json, log.jsonl, frames/).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bubbles/analyze.hpp"
#include "bubbles/cluster_io.hpp"
#include "bubbles/evolver.hpp"
#include "bubbles/seeds.hpp"
#include "bubbles/svg.hpp"

namespace bubbles {

using Json = nlohmann::ordered_json;

struct SeedSpec {
  std::string kind;  // circle, double, triple, chain, quadruple, file, result
  std::vector<double> areas;
  std::optional<double> density_exponent;  // defaults to the first p of the schedule
  Point center;                            // circle
  double r1 = 1.0, r2 = 1.0;               // double
  std::string placement = "vertex_at_origin";
  std::string pinned_end = "west";  // quadruple
  int segments_per_arc = kDefaultSegmentsPerArc;
  std::string path;        // file
  std::string experiment;  // result: final cluster of another experiment
  std::string anchor = "none";
  std::string targets_at;  // result: measure targets with this anchor at the new exponent
  Point translate;
  bool unpin = false;
  bool pin_origin_vertex = false;
};

struct CheckSpec {
  std::string name;
  std::map<std::string, double> params;
  std::vector<double> values;
  double param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

struct ExperimentSpec {
  std::string name;
  std::string description;
  SeedSpec seed;
  std::optional<std::vector<double>> target_areas;
  Schedule schedule;
  Json config = Json::object();  // EvolveConfig overrides
  std::vector<CheckSpec> checks;
  FrameOptions render;
  double budget_seconds = 0.0;
};

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  ExperimentSpec spec;
  Cluster cluster;
  RunLog log;
  bool evolved = false;
  bool converged = false;
  std::vector<CheckOutcome> checks;
  double elapsed_seconds = 0.0;
  bool checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace experiment_detail {

inline std::string at(const std::string& where, const std::string& key) { return where + "." + key; }

inline double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline std::vector<double> get_numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": expected a string");
  return j.get<std::string>();
}

inline Point get_point(const Json& j, const std::string& where) {
  const auto v = get_numbers(j, where);
  if (v.size() != 2) throw ParseError(where + ": expected [x, y]");
  return {v[0], v[1]};
}

inline SeedSpec parse_seed(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  SeedSpec s;
  if (!j.contains("kind")) throw ParseError(where + ": missing field 'kind'");
  s.kind = get_string(j["kind"], at(where, "kind"));
  for (const auto& [key, val] : j.items()) {
    const std::string w = at(where, key);
    if (key == "kind") continue;
    if (key == "areas") s.areas = get_numbers(val, w);
    else if (key == "density_exponent") s.density_exponent = get_number(val, w);
    else if (key == "center") s.center = get_point(val, w);
    else if (key == "r1") s.r1 = get_number(val, w);
    else if (key == "r2") s.r2 = get_number(val, w);
    else if (key == "placement") s.placement = get_string(val, w);
    else if (key == "pinned_end") s.pinned_end = get_string(val, w);
    else if (key == "segments_per_arc") s.segments_per_arc = static_cast<int>(get_number(val, w));
    else if (key == "path") s.path = get_string(val, w);
    else if (key == "experiment") s.experiment = get_string(val, w);
    else if (key == "anchor") s.anchor = get_string(val, w);
    else if (key == "targets_at") s.targets_at = get_string(val, w);
    else if (key == "translate") s.translate = get_point(val, w);
    else if (key == "unpin") s.unpin = val.get<bool>();
    else if (key == "pin_origin_vertex") s.pin_origin_vertex = val.get<bool>();
    else throw ParseError(w + ": unknown seed field");
  }
  static const std::vector<std::string> kinds{"circle", "double", "triple", "chain", "quadruple", "file", "result"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
    throw ParseError(at(where, "kind") + ": unknown seed '" + s.kind + "'");
  return s;
}

inline FrameOptions parse_render(const Json& j, const std::string& where) {
  FrameOptions f;
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, val] : j.items()) {
    const std::string w = at(where, key);
    if (key == "width") f.width = static_cast<int>(get_number(val, w));
    else if (key == "height") f.height = static_cast<int>(get_number(val, w));
    else if (key == "origin_marker") f.origin_marker = val.get<bool>();
    else if (key == "frame_every") f.frame_every = static_cast<int>(get_number(val, w));
    else if (key == "region_styles") {
      for (const auto& [label, style] : val.items()) f.region_styles[label] = get_string(style, at(w, label));
    } else throw ParseError(w + ": unknown render field");
  }
  if (f.width <= 0 || f.height <= 0) throw ParseError(where + ": width and height must be positive");
  if (f.frame_every < 0) throw ParseError(where + ".frame_every: must be >= 0");
  return f;
}

inline CheckSpec parse_check(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("check")) throw ParseError(where + ": expected an object with field 'check'");
  CheckSpec c;
  c.name = get_string(j["check"], at(where, "check"));
  for (const auto& [key, val] : j.items()) {
    if (key == "check") continue;
    if (key == "values") c.values = get_numbers(val, at(where, key));
    else c.params[key] = get_number(val, at(where, key));
  }
  static const std::vector<std::string> names{"regularity",  "perimeter",      "areas",
                                              "inner_arcs_through_origin", "circle_through_origin",
                                              "origin_valence4", "central_edge", "double_bubble_shape"};
  if (std::find(names.begin(), names.end(), c.name) == names.end())
    throw ParseError(at(where, "check") + ": unknown check '" + c.name + "'");
  return c;
}

inline ExperimentSpec parse_experiment(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  ExperimentSpec e;
  if (!j.contains("name")) throw ParseError(where + ": missing field 'name'");
  if (!j.contains("seed")) throw ParseError(where + ": missing field 'seed'");
  if (!j.contains("schedule")) throw ParseError(where + ": missing field 'schedule'");
  for (const auto& [key, val] : j.items()) {
    const std::string w = at(where, key);
    if (key == "name") e.name = get_string(val, w);
    else if (key == "description") e.description = get_string(val, w);
    else if (key == "seed") e.seed = parse_seed(val, w);
    else if (key == "target_areas") e.target_areas = get_numbers(val, w);
    else if (key == "schedule") {
      if (!val.is_object() || !val.contains("p_path")) throw ParseError(w + ": missing field 'p_path'");
      e.schedule.p_path = get_numbers(val["p_path"], at(w, "p_path"));
      if (val.contains("max_p_increment")) e.schedule.max_p_increment = get_number(val["max_p_increment"], at(w, "max_p_increment"));
    } else if (key == "config") {
      if (!val.is_object()) throw ParseError(w + ": expected an object");
      e.config = val;
    } else if (key == "checks") {
      if (!val.is_array()) throw ParseError(w + ": expected an array");
      for (std::size_t i = 0; i < val.size(); ++i) e.checks.push_back(parse_check(val[i], w + "[" + std::to_string(i) + "]"));
    } else if (key == "render") e.render = parse_render(val, w);
    else if (key == "budget_seconds") e.budget_seconds = get_number(val, w);
    else throw ParseError(w + ": unknown experiment field");
  }
  return e;
}

}  // namespace experiment_detail

struct ExperimentConfig {
  std::vector<ExperimentSpec> experiments;
  const ExperimentSpec& find(const std::string& name) const {
    for (const auto& e : experiments)
      if (e.name == name) return e;
    throw Error("unknown experiment '" + name + "'");
  }
};

inline ExperimentConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed configuration: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("experiments") || !doc["experiments"].is_array())
    throw ParseError("configuration: missing array 'experiments'");
  ExperimentConfig cfg;
  for (std::size_t i = 0; i < doc["experiments"].size(); ++i) {
    auto e = experiment_detail::parse_experiment(doc["experiments"][i], "experiments[" + std::to_string(i) + "]");
    for (const auto& prior : cfg.experiments)
      if (prior.name == e.name) throw ParseError("experiments[" + std::to_string(i) + "]: duplicate name '" + e.name + "'");
    cfg.experiments.push_back(std::move(e));
  }
  for (const auto& e : cfg.experiments)
    if (e.seed.kind == "result") {
      if (e.seed.experiment == e.name) throw ParseError(e.name + ": seed refers to itself");
      cfg.find(e.seed.experiment);
    }
  return cfg;
}

inline ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// Applies configuration overrides on top of the scale-aware defaults.
inline EvolveConfig make_config(const Cluster& seed, const Json& overrides) {
  EvolveConfig cfg = default_config(seed);
  for (const auto& [key, val] : overrides.items()) {
    if (key == "transitions") cfg.transitions = val.get<bool>();
    else if (key == "jiggle_amplitude") cfg.jiggle_amplitude = val.get<double>();
    else if (key == "jiggle_rel") cfg.jiggle_amplitude = val.get<double>() * diameter(seed);
    else if (key == "jiggle_noise") cfg.jiggle_noise = val.get<double>();
    else if (key == "rng_seed") cfg.rng_seed = val.get<unsigned long long>();
    else if (key == "max_iterations") cfg.max_iterations = val.get<int>();
    else if (key == "collapse_threshold_rel") cfg.collapse_threshold_rel = val.get<double>();
    else if (key == "collapse_window") cfg.collapse_window = val.get<int>();
    else if (key == "min_segments_per_arc") cfg.min_segments_per_arc = val.get<int>();
    else if (key == "refinement_divisors") {
      cfg.refinement_levels.clear();
      for (double d : val.get<std::vector<double>>()) cfg.refinement_levels.push_back(diameter(seed) / d);
    } else if (key == "direction") {
      const auto s = val.get<std::string>();
      if (s == "newton") cfg.direction = DescentDirection::newton;
      else if (s == "gradient") cfg.direction = DescentDirection::gradient;
      else throw ParseError("config.direction: expected \"newton\" or \"gradient\"");
    } else throw ParseError("config." + key + ": unknown setting");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Seeds

// Moves the cluster so the anchor sits at the origin: "central_edge_midpoint"
// (nothing pinned), "central_edge_west" / "central_edge_east" (that endpoint
// pinned), or "none".
inline Cluster anchor_cluster(const Cluster& c, const std::string& anchor) {
  if (anchor == "none") return c;
  const auto arcs = central_arcs(c);
  if (arcs.empty()) throw Error("anchor '" + anchor + "': cluster has no central edge");
  const ClusterIndex idx(c);
  const Point a = c.vertices[idx.v(arcs.front().first())].pos, b = c.vertices[idx.v(arcs.front().last())].pos;
  Cluster out;
  std::optional<int> pin;
  if (anchor == "central_edge_midpoint") {
    out = translate_cluster(c, -(a + b) * 0.5);
  } else if (anchor == "central_edge_west" || anchor == "central_edge_east") {
    const bool a_west = a.x < b.x;
    const bool want_a = (anchor == "central_edge_west") == a_west;
    out = translate_cluster(c, want_a ? -a : -b);
    pin = want_a ? arcs.front().first() : arcs.front().last();
  } else {
    throw Error("unknown anchor '" + anchor + "'");
  }
  for (auto& v : out.vertices) {
    v.pinned_to_origin = pin && v.id == *pin;
    if (v.pinned_to_origin) v.pos = {0.0, 0.0};
  }
  return out;
}

inline Cluster build_seed(const SeedSpec& s, double p, const std::function<Cluster(const std::string&)>& result_of) {
  const DensityField d{s.density_exponent.value_or(p)};
  Cluster c;
  if (s.kind == "circle") {
    if (s.areas.size() != 1) throw Error("circle seed: needs one area");
    c = circle_seed(s.areas[0], s.center, d);
  } else if (s.kind == "double") {
    DoublePlacement pl;
    if (s.placement == "vertex_at_origin") pl = DoublePlacement::vertex_at_origin;
    else if (s.placement == "center_at_origin") pl = DoublePlacement::center_at_origin;
    else throw Error("double seed: unknown placement '" + s.placement + "'");
    c = standard_double_bubble({s.r1, s.r2, s.segments_per_arc}, pl, d);
  } else if (s.kind == "triple") {
    c = triple_seed(s.areas, d, s.segments_per_arc);
  } else if (s.kind == "chain") {
    c = chain_seed(s.areas, d, s.segments_per_arc);
  } else if (s.kind == "quadruple") {
    if (s.pinned_end != "west" && s.pinned_end != "east") throw Error("quadruple seed: pinned_end must be west or east");
    c = quadruple_seed(s.areas, d, s.pinned_end == "west" ? CentralEnd::west : CentralEnd::east, s.segments_per_arc);
  } else if (s.kind == "file") {
    c = read_cluster_file(s.path);
    if (s.density_exponent) c.density = d;
  } else if (s.kind == "result") {
    const Cluster base = result_of(s.experiment);
    c = anchor_cluster(base, s.anchor);
    c.density = d;
    if (!s.targets_at.empty()) {
      Cluster probe = anchor_cluster(base, s.targets_at);
      probe.density = d;
      const auto areas = weighted_areas(probe);
      for (std::size_t i = 0; i < areas.size(); ++i) c.regions[i].target_weighted_area = areas[i];
    }
  }
  if (s.translate.x != 0.0 || s.translate.y != 0.0) c = translate_cluster(c, s.translate);
  if (s.unpin)
    for (auto& v : c.vertices) v.pinned_to_origin = false;
  if (s.pin_origin_vertex) {
    Vertex* best = nullptr;
    for (auto& v : c.vertices)
      if (!best || norm(v.pos) < norm(best->pos)) best = &v;
    if (!best || norm(best->pos) > origin_radius(c)) throw Error("pin_origin_vertex: no vertex at the origin");
    best->pos = {0.0, 0.0};
    best->pinned_to_origin = true;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Checks

namespace experiment_detail {

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline Cluster analytic_double(const ExperimentSpec& spec, const Cluster& c) {
  Cluster ref = standard_double_bubble({spec.seed.r1, spec.seed.r2, 256}, DoublePlacement::vertex_at_origin, c.density);
  for (std::size_t i = 0; i < ref.regions.size() && i < c.regions.size(); ++i)
    ref.regions[i].target_weighted_area = c.regions[i].target_weighted_area;
  return scale_to_total_area(ref);
}

}  // namespace experiment_detail

inline CheckOutcome run_check(const CheckSpec& chk, const ExperimentSpec& spec, const Cluster& c) {
  using experiment_detail::num;
  CheckOutcome out{chk.name, false, ""};
  const Tolerances defaults;
  Tolerances tol;
  tol.angle_deg = chk.param("angle_deg", defaults.angle_deg);
  tol.constancy = chk.param("constancy", defaults.constancy);
  tol.circle_rms_rel = chk.param("rms_rel", defaults.circle_rms_rel);
  tol.through_origin = chk.param("through_origin", defaults.through_origin);
  if (chk.name == "regularity") {
    const auto r = regularity_report(c, tol);
    out.passed = r.passed();
    double worst_angle = 0.0, worst_defect = 0.0;
    for (const auto& [vid, angles] : r.junction_angles) {
      const Vertex& v = c.vertices[ClusterIndex(c).v(vid)];
      if (angle_exempt(c, v, tol.origin_spacings)) continue;
      for (double a : angles) worst_angle = std::max(worst_angle, std::abs(a - 120.0));
    }
    for (const auto& a : r.arcs)
      if (!a.error) worst_defect = std::max(worst_defect, a.constancy_defect);
    out.detail = "max |angle-120| " + num(worst_angle) + " deg, max constancy defect " + num(worst_defect) + ", " +
                 std::to_string(r.angle_violations.size()) + " angle violations, " +
                 std::to_string(r.constancy_failures().size()) + " constancy failures";
  } else if (chk.name == "perimeter") {
    const double per = weighted_perimeter(c);
    out.passed = per > chk.param("min", -INFINITY) && per < chk.param("max", INFINITY);
    out.detail = "perimeter " + num(per);
  } else if (chk.name == "areas") {
    const auto areas = weighted_areas(c);
    const double t = chk.param("tolerance", 0.05);
    out.passed = areas.size() == chk.values.size();
    out.detail = "areas";
    for (std::size_t i = 0; i < areas.size(); ++i) {
      out.detail += " " + num(areas[i]);
      if (i < chk.values.size() && std::abs(areas[i] - chk.values[i]) > t) out.passed = false;
    }
  } else if (chk.name == "inner_arcs_through_origin") {
    const auto reports = arc_regularity(c, tol);
    int inner = 0, good = 0;
    for (const auto& a : reports) {
      if (a.left_region == kExterior || a.right_region == kExterior) continue;
      ++inner;
      if (!a.error && a.circular_through_origin) ++good;
    }
    out.passed = inner > 0 && good == inner;
    out.detail = std::to_string(good) + " of " + std::to_string(inner) + " inner arcs circular through the origin";
  } else if (chk.name == "circle_through_origin") {
    const auto reports = arc_regularity(c, tol);
    out.passed = !reports.empty();
    double rms = 0.0, through = 0.0;
    for (const auto& a : reports) {
      if (a.error || !a.circular_through_origin) out.passed = false;
      rms = std::max(rms, a.rms_rel);
      through = std::max(through, a.through_origin_residual);
    }
    out.detail = "rms/radius " + num(rms) + ", through-origin residual " + num(through);
  } else if (chk.name == "origin_valence4") {
    const auto val = origin_valence(c);
    const auto central = central_arcs(c);
    out.passed = val == 4 && central.empty();
    out.detail = "origin valence " + std::to_string(val) + ", " + std::to_string(central.size()) + " central edges";
  } else if (chk.name == "central_edge") {
    const auto central = central_arcs(c);
    if (central.empty()) {
      out.detail = "no central edge";
    } else {
      const ClusterIndex idx(c);
      const double len = arc_euclidean_length(c, idx, central.front());
      const bool at_origin = norm(c.vertices[idx.v(central.front().first())].pos) <= origin_radius(c) ||
                             norm(c.vertices[idx.v(central.front().last())].pos) <= origin_radius(c);
      out.passed = at_origin;
      out.detail = "central edge length " + num(len) + (at_origin ? ", endpoint at origin" : ", no endpoint at origin");
    }
  } else if (chk.name == "double_bubble_shape") {
    const Cluster ref = experiment_detail::analytic_double(spec, c);
    const double h = junction_aligned_hausdorff(ref, c) / diameter(ref);
    out.passed = h < chk.param("hausdorff_rel", 1e-2);
    out.detail = "Hausdorff/diameter " + num(h) + " against the analytic construction (P " +
                 num(weighted_perimeter(ref)) + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Documents

inline Json log_record_json(const LogRecord& r) {
  Json j;
  j["stage"] = r.stage;
  j["p"] = r.p;
  j["level"] = r.level;
  j["iteration"] = r.iteration;
  j["perimeter"] = r.perimeter;
  j["max_area_residual"] = r.max_area_residual;
  j["residual_norm"] = r.residual_norm;
  j["step"] = r.step;
  j["events"] = r.events;
  if (r.snapshot) j["snapshot"] = Json::parse(save_cluster(*r.snapshot));
  return j;
}

inline Json summary_json(const ExperimentResult& r) {
  Json j;
  j["name"] = r.spec.name;
  j["p"] = r.cluster.density.p;
  j["perimeter"] = weighted_perimeter(r.cluster);
  std::vector<double> targets;
  for (const auto& reg : r.cluster.regions) targets.push_back(reg.target_weighted_area);
  j["target_areas"] = targets;
  j["areas"] = weighted_areas(r.cluster);
  j["evolved"] = r.evolved;
  j["converged"] = r.converged;
  Json stages = Json::array();
  for (const auto& s : r.log.stages) {
    Json st;
    st["p"] = s.p;
    st["perimeter"] = s.perimeter;
    st["areas"] = s.areas;
    st["residual_norm"] = s.residual_norm;
    st["iterations"] = s.iterations;
    st["converged"] = s.converged;
    st["topology_limited"] = s.topology_limited;
    if (s.cluster) {
      const auto central = central_arcs(*s.cluster);
      if (central.empty()) st["central_edge_length"] = nullptr;
      else st["central_edge_length"] = arc_euclidean_length(*s.cluster, ClusterIndex(*s.cluster), central.front());
      st["origin_valence"] = origin_valence(*s.cluster);
    }
    stages.push_back(st);
  }
  j["stages"] = stages;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"check", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  j["warnings"] = r.log.warnings;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["budget_seconds"] = r.spec.budget_seconds;
  return j;
}

inline RunSummary parse_summary(const std::string& text, const std::string& where) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(where + ": " + e.what());
  }
  RunSummary s;
  try {
    s.name = j.at("name").get<std::string>();
    s.p = j.at("p").get<double>();
    s.perimeter = j.at("perimeter").get<double>();
    s.target_areas = j.at("target_areas").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Running

struct RunOptions {
  std::optional<unsigned long long> rng_seed;
  std::optional<double> angle_deg;
  std::optional<double> constancy;
  std::function<void(const std::string&)> progress;
};

class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig cfg, RunOptions opt = {}) : cfg_(std::move(cfg)), opt_(std::move(opt)) {}

  const ExperimentResult& run(const std::string& name) {
    if (auto it = done_.find(name); it != done_.end()) return it->second;
    if (std::find(active_.begin(), active_.end(), name) != active_.end())
      throw Error("experiment '" + name + "' depends on itself");
    active_.push_back(name);
    ExperimentResult r = execute(cfg_.find(name));
    active_.pop_back();
    return done_.emplace(name, std::move(r)).first->second;
  }

  const ExperimentConfig& config() const { return cfg_; }

 private:
  ExperimentResult execute(const ExperimentSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult r;
    r.spec = spec;
    const double p0 = spec.schedule.p_path.empty() ? 0.0 : spec.schedule.p_path.front();
    Cluster seed = build_seed(spec.seed, p0, [&](const std::string& dep) { return run(dep).cluster; });
    if (spec.target_areas) {
      if (spec.target_areas->size() != seed.regions.size())
        throw Error(spec.name + ": target_areas has " + std::to_string(spec.target_areas->size()) +
                    " entries for " + std::to_string(seed.regions.size()) + " regions");
      for (std::size_t i = 0; i < seed.regions.size(); ++i) seed.regions[i].target_weighted_area = (*spec.target_areas)[i];
    }
    if (auto v = validate(seed); !v.empty()) throw ValidationError(spec.name + ": invalid seed:\n" + describe(v));
    if (opt_.progress) opt_.progress(spec.name + ": start");
    if (spec.schedule.p_path.empty()) {
      r.cluster = seed;
      r.converged = true;
    } else {
      EvolveConfig base = make_config(seed, spec.config);
      if (opt_.rng_seed) base.rng_seed = *opt_.rng_seed;
      Schedule sched = spec.schedule;
      sched.snapshot_every = spec.render.frame_every;
      auto [out, log] = bubbles::run(seed, sched, base);
      r.cluster = std::move(out);
      r.log = std::move(log);
      r.evolved = true;
      r.converged = !r.log.stages.empty() &&
                    std::all_of(r.log.stages.begin(), r.log.stages.end(),
                                [](const StageSummary& s) { return s.converged || s.topology_limited; });
    }
    for (CheckSpec chk : spec.checks) {
      if (opt_.angle_deg) chk.params["angle_deg"] = *opt_.angle_deg;
      if (opt_.constancy) chk.params["constancy"] = *opt_.constancy;
      r.checks.push_back(run_check(chk, spec, r.cluster));
    }
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt_.progress) opt_.progress(spec.name + ": done in " + experiment_detail::num(r.elapsed_seconds) + " s");
    return r;
  }

  ExperimentConfig cfg_;
  RunOptions opt_;
  std::map<std::string, ExperimentResult> done_;
  std::vector<std::string> active_;
};

// Writes summary.json, cluster.json, log.jsonl, final.svg and, when frames
// were requested, frames/frame_NNNNN.svg under dir.
inline void write_artifacts(const ExperimentResult& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_text_file((dir / "summary.json").string(), summary_json(r).dump(2) + "\n");
  write_text_file((dir / "cluster.json").string(), save_cluster(r.cluster));
  std::ostringstream log;
  for (const auto& rec : r.log.records) log << log_record_json(rec).dump() << "\n";
  write_text_file((dir / "log.jsonl").string(), log.str());
  write_text_file((dir / "final.svg").string(), render_svg(r.cluster, r.spec.render, r.spec.name));
  if (r.spec.render.frame_every > 0) {
    fs::remove_all(dir / "frames");
    fs::create_directories(dir / "frames");
    for (const auto& rec : r.log.records) {
      if (!rec.snapshot) continue;
      char file[32];
      std::snprintf(file, sizeof file, "frame_%05d.svg", rec.iteration);
      write_text_file((dir / "frames" / file).string(),
                      render_svg(*rec.snapshot, r.spec.render, r.spec.name + " step " + std::to_string(rec.iteration)));
    }
  }
}

// Reads the snapshots back from a log.jsonl document.
inline std::vector<std::pair<int, Cluster>> read_log_snapshots(const std::string& text) {
  std::vector<std::pair<int, Cluster>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError("log line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("snapshot")) continue;
    if (!j.contains("iteration") || !j["iteration"].is_number_integer())
      throw ParseError("log line " + std::to_string(lineno) + ": missing integer 'iteration'");
    out.emplace_back(j["iteration"].get<int>(), load_cluster(j["snapshot"].dump()));
  }
  return out;
}

}  // namespace bubbles
