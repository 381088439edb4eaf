#include <CLI11.hpp>
#include <iostream>

#include "bubbles/commands.hpp"

int main(int argc, char** argv) {
  using namespace bubbles;
  CLI::App app{"Planar bubble clusters under the density r^p"};
  app.require_subcommand(1);

  EvolveRequest ev;
  std::optional<double> angle_tol, constancy_tol;
  std::optional<unsigned long long> rng_seed;
  bool all = false;
  auto* evolve = app.add_subcommand("evolve", "Run experiments from a configuration file");
  evolve->add_option("-c,--config", ev.config_path, "Experiment configuration (JSON)")->required();
  evolve->add_option("-e,--experiment", ev.experiments, "Experiment name (repeatable)");
  evolve->add_flag("--all", all, "Run every experiment in the file");
  evolve->add_option("-o,--out", ev.out_dir, "Output directory")->capture_default_str();
  evolve->add_option("--rng-seed", rng_seed, "Override the jiggle seed");
  evolve->add_option("--angle-tol", angle_tol, "Junction angle tolerance in degrees");
  evolve->add_option("--constancy-tol", constancy_tol, "Generalized-curvature constancy tolerance");

  std::vector<std::string> summaries;
  auto* cmp = app.add_subcommand("compare", "Compare run summaries");
  cmp->add_option("summaries", summaries, "summary.json files")->required();

  CheckRequest ck;
  std::optional<double> check_p;
  auto* check = app.add_subcommand("check", "Regularity report for a cluster document");
  check->add_option("cluster", ck.cluster_path, "Cluster document")->required();
  check->add_option("-p,--density-exponent", check_p, "Override the document's exponent");
  check->add_option("--angle-tol", ck.tolerances.angle_deg, "Junction angle tolerance in degrees")->capture_default_str();
  check->add_option("--constancy-tol", ck.tolerances.constancy, "Constancy tolerance")->capture_default_str();
  check->add_option("--circle-tol", ck.tolerances.circle_rms_rel, "Circle fit rms/radius tolerance")->capture_default_str();
  check->add_option("--origin-tol", ck.tolerances.through_origin, "Through-origin tolerance")->capture_default_str();

  RenderRequest rr;
  bool no_marker = false;
  auto* render = app.add_subcommand("render", "Render a cluster document or a run log to SVG");
  render->add_option("input", rr.input, "Cluster document (.json) or run log (.jsonl)")->required();
  render->add_option("-o,--output", rr.output, "Output file, or frame directory for logs");
  render->add_option("--width", rr.frame.width)->capture_default_str();
  render->add_option("--height", rr.frame.height)->capture_default_str();
  render->add_option("--frame-every", rr.frame.frame_every, "Steps between frames (logs)")->capture_default_str();
  render->add_flag("--no-origin-marker", no_marker);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  if (*evolve) {
    if (!all && ev.experiments.empty()) {
      std::cerr << "error: name an experiment with --experiment or pass --all\n";
      return kExitError;
    }
    ev.options.rng_seed = rng_seed;
    ev.options.angle_deg = angle_tol;
    ev.options.constancy = constancy_tol;
    ev.options.progress = [](const std::string& msg) { std::cerr << msg << std::endl; };
    return cmd_evolve(ev, std::cout, std::cerr);
  }
  if (*cmp) return cmd_compare(summaries, std::cout, std::cerr);
  if (*check) {
    ck.p = check_p;
    return cmd_check(ck, std::cout, std::cerr);
  }
  rr.frame.origin_marker = !no_marker;
  return cmd_render(rr, std::cout, std::cerr);
}
