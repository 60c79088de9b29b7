#include "cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using ocokit::cli::ExperimentConfig;
  CLI::App app{"ocokit: weighted-regret online convex optimization experiments"};
  app.set_version_flag("--version", std::string(ocokit::kVersion));
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string out;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Output directory (default: $OCOKIT_OUT or ./ocokit-out/<command>)");
    cmd->add_option("--seed", cfg.seed, "Seed for instance randomization")->capture_default_str();
    cmd->add_flag("--dump-iterates", cfg.dump_iterates, "Also write iterates.csv");
  };

  auto* oco = app.add_subcommand("oco", "Online convex optimization runs")->require_subcommand(1);
  auto* oco_run = oco->add_subcommand("run", "Run MD/MP on a loss stream and report weighted regret");
  oco_run->add_option("--regime", cfg.regime, "nonsmooth | strongly-convex | smooth")->required();
  oco_run->add_option("--T,--horizon", cfg.horizon, "Horizon (default: all instance terms, or 256)");
  oco_run->add_option("--instance", cfg.instance, "Stream instance JSON (default: synthetic stream)");
  oco_run->add_option("--domain", cfg.domain, "Synthetic stream domain: simplex | ball");
  oco_run->add_flag("--bound-check", cfg.bound_check, "Exit 1 when the realized regret exceeds the bound");
  oco_run->add_flag("--rate-table", cfg.rate_table, "Also run T, 2T, 4T, 8T and write rate_table.csv");
  common(oco_run);

  auto* ro = app.add_subcommand("ro", "Robust feasibility")->require_subcommand(1);
  auto* ro_solve = ro->add_subcommand("solve", "Decide eps-feasibility of a robust instance");
  bool no_doubling = false;
  ro_solve->add_option("--instance", cfg.instance, "Robust instance JSON")->required();
  ro_solve->add_option("--scheme", cfg.scheme,
                       "strong-strong | strongU-smoothX | smoothU-strongX | baseline-nonsmooth")
      ->required();
  ro_solve->add_option("--eps", cfg.eps, "Target accuracy")->required();
  ro_solve->add_option("--tau", cfg.tau, "Budget split in (0, 1)")->capture_default_str();
  ro_solve->add_option("--horizon", cfg.horizon, "Horizon (default: from the bounds)");
  ro_solve->add_flag("--no-doubling", no_doubling, "Do not retry with doubled horizons when inconclusive");
  common(ro_solve);

  auto* jeo = app.add_subcommand("jeo", "Joint estimation-optimization")->require_subcommand(1);
  auto* jeo_run = jeo->add_subcommand("run", "Run an estimator and the optimizer in lockstep");
  jeo_run->add_option("--instance", cfg.instance, "JEO instance JSON")->required();
  jeo_run->add_option("--regime", cfg.regime, "nonsmooth | strongly-convex | smooth")->required();
  jeo_run->add_option("--horizon", cfg.horizon, "Horizon")->required();
  jeo_run->add_option("--stream", cfg.stream, "from-g | file")->capture_default_str();
  jeo_run->add_option("--stream-file", cfg.stream_file, "Estimates, one comma separated vector per line");
  common(jeo_run);

  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ocokit::cli::kExitError;
  }

  if (oco->parsed()) cfg.command = "oco";
  if (ro->parsed()) cfg.command = "ro";
  if (jeo->parsed()) cfg.command = "jeo";
  if (verify->parsed()) cfg.command = "verify";
  cfg.doubling = !no_doubling;
  if (!out.empty()) cfg.out = out;

  try {
    return ocokit::cli::run_experiment(cfg, std::cout);
  } catch (const ocokit::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const ocokit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return ocokit::cli::kExitError;
}
