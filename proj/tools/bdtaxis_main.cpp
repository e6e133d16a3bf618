#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bdtaxis/cli.hpp"

using namespace bdtaxis;

int main(int argc, char** argv) {
  CLI::App app{"Free-boundary predator-prey simulator with prey-taxis"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool force = false;
  int jobs = 1;
  bool flip_predation = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--set", overrides, "override, section.key=value (repeatable)");
  };

  auto* simulate = app.add_subcommand("simulate", "run the solver and write CSV output");
  common(simulate);
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--force", force, "overwrite existing output");
  simulate->add_flag("--test-hook-flip-predation", flip_predation,
                     "deliberately corrupt the prey kinetics (harness check)");

  auto* classify = app.add_subcommand("classify", "run and print the spreading/vanishing verdict");
  common(classify);

  std::string param;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "classify over a grid of one model parameter");
  common(sweep);
  sweep->add_option("--param", param, "model parameter name, e.g. mu or h0")->required();
  sweep->add_option("--values", values, "comma list, or lo:hi:n")->required();
  sweep->add_option("--out", out_dir, "output directory for phase.csv");
  sweep->add_flag("--force", force, "overwrite phase.csv");
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  BisectCliOptions bisect_opt;
  double lo = 0.0, hi = 0.0;
  auto* bisect = app.add_subcommand("bisect", "bracket the spreading threshold in mu");
  common(bisect);
  auto* lo_opt = bisect->add_option("--lo", lo, "left bracket end (default mu0)");
  auto* hi_opt = bisect->add_option("--hi", hi, "right bracket end (default mu^0)");
  bisect->add_option("--iters", bisect_opt.iterations, "bisection steps")
      ->check(CLI::NonNegativeNumber);
  bisect->add_option("--extensions", bisect_opt.max_extensions,
                     "t_max doublings for an undetermined probe")
      ->check(CLI::NonNegativeNumber);
  bisect->add_option("--jobs", jobs, "verify the bracket ends concurrently when > 1")
      ->check(CLI::PositiveNumber);

  VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "run the oracle suite");
  common(verify);
  verify->add_flag("--verbose", verify_opt.verbose, "print worst margins per check");
  verify->add_option("--horizon", verify_opt.horizon, "t_max for comparison and cross-solver runs")
      ->check(CLI::PositiveNumber);
  verify->add_option("--vanishing-horizon", verify_opt.vanishing_horizon,
                     "t_max for the supersolution and decay runs")
      ->check(CLI::PositiveNumber);
  verify->add_flag("--test-hook-flip-predation", flip_predation,
                   "deliberately corrupt the prey kinetics (harness check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code::config;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path, overrides);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config;
  }

  std::optional<std::string> out = out_dir.empty() ? std::nullopt : std::optional(out_dir);
  TestHooks hooks;
  hooks.flip_predation_sign = flip_predation;

  try {
    if (*simulate) return cmd_simulate(cfg, {out, force, hooks}, std::cout, std::cerr);
    if (*classify) return cmd_classify(cfg, std::cout, std::cerr);
    if (*sweep) {
      SweepOptions so;
      so.param = param;
      so.values = parse_value_grid(values);
      so.out_dir = out;
      so.force = force;
      so.jobs = jobs;
      return cmd_sweep(cfg, so, std::cout, std::cerr);
    }
    if (*bisect) {
      if (*lo_opt) bisect_opt.lo = lo;
      if (*hi_opt) bisect_opt.hi = hi;
      bisect_opt.jobs = jobs;
      return cmd_bisect(cfg, bisect_opt, std::cout, std::cerr);
    }
    if (*verify) {
      verify_opt.hooks = hooks;
      return cmd_verify(cfg, verify_opt, std::cout, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config;
  }
  return exit_code::config;
}
