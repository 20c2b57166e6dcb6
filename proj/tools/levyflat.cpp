#include "cli/config.hpp"
#include "cli/plots.hpp"
#include "cli/runner.hpp"

#include "levyflat/errors.hpp"
#include "levyflat/models.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace lc = levyflat::cli;

int main(int argc, char** argv) {
  CLI::App app{"levyflat: numerical checks of invariant manifolds for Levy-driven SPDEs"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the selected tests on a model and write report.json");
  std::string config_path, model, tests, out_dir;
  std::uint64_t seed = 0;
  double dt = 0, horizon = 0, radius = 0, tol = 0, eps_min = 0;
  double th_tangency = 0, th_jump = 0, th_path = 0, th_decompose = 0, ratio_cutoff = 0, shift_extent = 0;
  int n_paths = 0, n_samples = 0, write_paths = 0;
  bool no_halving = false;
  run->add_option("-c,--config", config_path, "YAML config file (JSON when the name ends in .json)");
  auto* o_model = run->add_option("-m,--model", model, "hjmm-vasicek | sine-counterexample | fixture:<name>");
  auto* o_tests = run->add_option("-t,--tests", tests, "Comma-separated tests or 'all' (empty string: none)");
  auto* o_seed = run->add_option("-s,--seed", seed, "Master seed (default from LEVYFLAT_SEED, else 0)");
  auto* o_out = run->add_option("-o,--out", out_dir, "Output directory");
  auto* o_dt = run->add_option("--dt", dt, "Time step");
  auto* o_horizon = run->add_option("-T,--horizon", horizon, "Time horizon");
  auto* o_paths = run->add_option("--n-paths", n_paths, "Monte Carlo paths");
  auto* o_write = run->add_option("--write-paths", write_paths, "Paths written as CSV");
  auto* o_halving = run->add_flag("--no-halving", no_halving, "Skip the dt/2 companion run");
  auto* o_radius = run->add_option("--radius", radius, "Flatness sampling radius");
  auto* o_samples = run->add_option("--n-samples", n_samples, "Tangent spaces sampled per base point");
  auto* o_tol = run->add_option("--tol", tol, "Flatness intersection tolerance");
  auto* o_eps = run->add_option("--eps-min", eps_min, "Small-jump support threshold");
  auto* o_tt = run->add_option("--tangency-threshold", th_tangency);
  auto* o_jt = run->add_option("--jump-closure-threshold", th_jump);
  auto* o_pt = run->add_option("--path-threshold", th_path);
  auto* o_rc = run->add_option("--ratio-cutoff", ratio_cutoff);
  auto* o_dth = run->add_option("--decompose-threshold", th_decompose);
  auto* o_ext = run->add_option("--shift-extent", shift_extent);

  auto* plots = app.add_subcommand("emit-plots", "Write gnuplot data files from a report");
  std::string report_path, plot_dir;
  plots->add_option("report", report_path, "report.json")->required();
  plots->add_option("-o,--out", plot_dir, "Output directory (default: next to the report)");

  app.add_subcommand("list-models", "List built-in models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lc::kExitConfig;
  }

  if (app.got_subcommand("list-models")) {
    for (const auto& name : levyflat::model_names()) {
      std::cout << name;
      const auto keys = lc::model_param_keys(name);
      if (!keys.empty()) {
        std::cout << "  (params:";
        for (const auto& k : keys) std::cout << ' ' << k;
        std::cout << ')';
      }
      std::cout << '\n';
    }
    return 0;
  }
  if (app.got_subcommand("emit-plots")) return lc::emit_plots_command(report_path, plot_dir, std::cout, std::cerr);

  lc::RunConfig config;
  try {
    if (!config_path.empty()) lc::apply_document(config, lc::load_config_document(config_path));
    if (*o_model) config.model = model;
    if (*o_tests) config.tests = lc::normalize_tests(lc::split_list(tests));
    if (*o_seed) {
      config.seed = seed;
      config.seed_source = "flag";
    }
    if (*o_out) config.output_dir = out_dir;
    if (*o_dt) config.simulation.dt = dt;
    if (*o_horizon) config.simulation.horizon = horizon;
    if (*o_paths) config.simulation.n_paths = n_paths;
    if (*o_write) config.simulation.write_paths = write_paths;
    if (*o_halving) config.simulation.halving = !no_halving;
    if (*o_radius) config.flatness.radius = radius;
    if (*o_samples) config.flatness.n_samples = n_samples;
    if (*o_tol) config.flatness.tol = tol;
    if (*o_eps) config.eps_min = eps_min;
    if (*o_tt) config.thresholds.tangency = th_tangency;
    if (*o_jt) config.thresholds.jump_closure = th_jump;
    if (*o_pt) config.thresholds.path_invariance = th_path;
    if (*o_rc) config.thresholds.ratio_cutoff = ratio_cutoff;
    if (*o_dth) config.thresholds.decompose = th_decompose;
    if (*o_ext) config.decompose.shift_extent = shift_extent;
    lc::apply_seed_env(config);
    lc::validate(config);
  } catch (const levyflat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return lc::kExitConfig;
  }
  return lc::run(config, std::cout, std::cerr);
}
