#pragma once

// The evolve / compare / check / render commands behind the CLI.
// Exit codes: 0 pass, 2 check failure, 1 error.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bubbles/experiment.hpp"

namespace bubbles {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailure = 2;

namespace command_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string fixed(double x, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace command_detail

struct EvolveRequest {
  std::string config_path;
  std::vector<std::string> experiments;  // empty = every experiment in the file
  std::string out_dir = "out";
  RunOptions options;
};

inline int cmd_evolve(const EvolveRequest& req, std::ostream& out, std::ostream& err) {
  try {
    ExperimentRunner runner(read_config_file(req.config_path), req.options);
    std::vector<std::string> names = req.experiments;
    if (names.empty())
      for (const auto& e : runner.config().experiments) names.push_back(e.name);
    for (const auto& n : names) runner.config().find(n);
    int status = kExitPass;
    for (const auto& n : names) {
      const ExperimentResult& r = runner.run(n);
      write_artifacts(r, std::filesystem::path(req.out_dir) / n);
      out << n << ": perimeter " << command_detail::fixed(weighted_perimeter(r.cluster), 6) << " at p "
          << r.cluster.density.p << (r.converged ? ", converged" : ", NOT converged") << ", "
          << command_detail::fixed(r.elapsed_seconds, 1) << " s\n";
      for (const auto& c : r.checks) out << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.name << ": " << c.detail << "\n";
      for (const auto& w : r.log.warnings) out << "  warning: " << w << "\n";
      if (!r.converged || !r.checks_passed()) status = kExitCheckFailure;
    }
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline int cmd_compare(const std::vector<std::string>& summary_paths, std::ostream& out, std::ostream& err) {
  try {
    if (summary_paths.size() < 2) throw IncomparableRunsError("compare: need at least two run summaries");
    std::vector<RunSummary> runs;
    for (const auto& p : summary_paths) runs.push_back(parse_summary(command_detail::read_file(p), p));
    const ComparisonTable t = compare(runs);
    std::size_t width = 4;
    for (const auto& r : t.runs) width = std::max(width, r.name.size());
    out << "p = " << t.runs[0].p << "\n";
    out << std::string(width, ' ') << "  perimeter     ";
    for (const auto& r : t.runs) out << "  -" << r.name;
    out << "\n";
    for (std::size_t i = 0; i < t.runs.size(); ++i) {
      out << t.runs[i].name << std::string(width - t.runs[i].name.size(), ' ') << "  "
          << command_detail::fixed(t.runs[i].perimeter, 8);
      for (std::size_t j = 0; j < t.runs.size(); ++j) {
        const std::string cell = command_detail::fixed(t.differences[i][j], 6);
        out << "  " << std::string(std::max<std::size_t>(t.runs[j].name.size() + 1, cell.size()) - cell.size(), ' ') << cell;
      }
      out << "\n";
    }
    out << "winner: " << t.runs[t.winner].name << "\n";
    return kExitPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

struct CheckRequest {
  std::string cluster_path;
  std::optional<double> p;
  Tolerances tolerances;
};

inline void print_report(const RegularityReport& r, const Cluster& c, std::ostream& out) {
  out << "perimeter " << command_detail::fixed(r.perimeter, 8) << "  p " << c.density.p << "  residual "
      << r.residual_norm << "\n";
  for (const auto& [rid, a] : r.areas) out << "region " << rid << " area " << command_detail::fixed(a, 8) << "\n";
  const ClusterIndex idx(c);
  for (const auto& [vid, angles] : r.junction_angles) {
    out << "junction " << vid << (angle_exempt(c, c.vertices[idx.v(vid)], r.tolerances.origin_spacings) ? " (origin, exempt)" : "") << ":";
    for (double a : angles) out << " " << command_detail::fixed(a, 3);
    out << "\n";
  }
  for (std::size_t i = 0; i < r.arcs.size(); ++i) {
    const ArcReport& a = r.arcs[i];
    out << "arc " << i << " " << region_name(a.left_region) << "|" << region_name(a.right_region) << " ";
    if (a.error) {
      out << "error: " << *a.error << "\n";
      continue;
    }
    out << (a.straight ? "straight" : "radius " + command_detail::fixed(a.fit.radius, 6)) << " rms/r " << a.rms_rel
        << " origin " << a.through_origin_residual << " kappa " << a.kappa_mean << " defect " << a.constancy_defect
        << (a.circular_through_origin ? " circular-through-origin" : "") << "\n";
  }
  for (const auto& v : r.angle_violations) {
    out << "VIOLATION junction " << v.vertex_id << " angles";
    for (double a : v.angles) out << " " << command_detail::fixed(a, 3);
    out << " (off by " << command_detail::fixed(v.worst_deviation, 3) << " deg)\n";
  }
  for (const ArcReport* a : r.constancy_failures())
    out << "VIOLATION arc " << region_name(a->left_region) << "|" << region_name(a->right_region) << " from vertex "
        << a->vertex_ids.front() << ": constancy defect " << a->constancy_defect << "\n";
  out << (r.passed() ? "regularity: pass\n" : "regularity: FAIL\n");
}

inline int cmd_check(const CheckRequest& req, std::ostream& out, std::ostream& err) {
  try {
    Cluster c = read_cluster_file(req.cluster_path);
    if (req.p) c.density.p = *req.p;
    const RegularityReport r = regularity_report(c, req.tolerances);
    print_report(r, c, out);
    return r.passed() ? kExitPass : kExitCheckFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

struct RenderRequest {
  std::string input;   // cluster document or log.jsonl
  std::string output;  // .svg file for a cluster, directory for frames
  FrameOptions frame;
};

inline int cmd_render(const RenderRequest& req, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  try {
    const std::string text = command_detail::read_file(req.input);
    const bool is_log = fs::path(req.input).extension() == ".jsonl";
    if (!is_log) {
      const fs::path target = req.output.empty() ? fs::path(req.input).replace_extension(".svg") : fs::path(req.output);
      write_text_file(target.string(), render_svg(load_cluster(text), req.frame));
      out << target.string() << "\n";
      return kExitPass;
    }
    const auto snaps = read_log_snapshots(text);
    if (snaps.empty()) throw Error(req.input + ": log holds no snapshots; evolve with render.frame_every > 0");
    const fs::path dir = req.output.empty() ? fs::path(req.input).parent_path() / "frames" : fs::path(req.output);
    fs::create_directories(dir);
    int written = 0;
    for (const auto& [iteration, cluster] : snaps) {
      if (req.frame.frame_every > 0 && iteration % req.frame.frame_every != 0) continue;
      char file[32];
      std::snprintf(file, sizeof file, "frame_%05d.svg", iteration);
      write_text_file((dir / file).string(), render_svg(cluster, req.frame, "step " + std::to_string(iteration)));
      ++written;
    }
    out << written << " frames in " << dir.string() << "\n";
    return kExitPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace bubbles
