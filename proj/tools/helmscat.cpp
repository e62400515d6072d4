#include <CLI11.hpp>

#include <iostream>

#include "helmscat/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"helmscat: 2-D diffraction tomography with a multigrid Helmholtz solver"};
  app.require_subcommand(1);

  helmscat::CommandOptions options;
  std::string config, out_dir = ".";
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "key = value run configuration")->required();
    cmd->add_option("--out-dir", out_dir, "directory for output files");
    cmd->add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "overrides the config's seed key");
  };
  auto* simulate = app.add_subcommand("simulate", "simulate scattered-field measurements");
  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct a refractive-index map");
  auto* bench = app.add_subcommand("bench", "disk sweeps against the analytic solution");
  for (auto* cmd : {simulate, reconstruct, bench}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : helmscat::kExitConfig;
  }
  options.config = config;
  options.out_dir = out_dir;
  for (auto* cmd : {simulate, reconstruct, bench}) {
    if (*cmd && cmd->count("--seed") > 0) options.seed = seed;
  }

  if (*simulate) return helmscat::run_simulate(options, std::cout);
  if (*reconstruct) return helmscat::run_reconstruct(options, std::cout);
  return helmscat::run_bench(options, std::cout);
}
