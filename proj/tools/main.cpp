#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rydcav/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate and fit Rydberg atoms driven by a superconducting resonator"};
  app.set_version_flag("--version", std::string(RYDCAV_VERSION));

  rydcav::RunOptions opts;
  std::string command;
  std::string config;
  std::string data;
  std::string out;
  long long seed = -1;

  app.add_option("command", command, "simulate-rabi | simulate-ramsey | fit-rabi | fit-ramsey | "
                                     "resonator-response | synth")
      ->required()
      ->check(CLI::IsMember(rydcav::commands()));
  app.add_option("--config", config, "key = value run configuration")->required();
  app.add_option("--data", data, "input dataset for fit commands");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  app.add_option("--threads", opts.threads, "worker threads (default: RYDCAV_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose,-v", opts.verbose, "progress messages on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rydcav::kExitConfig;
  }

  opts.command = command;
  opts.config = config;
  if (!data.empty()) opts.data = data;
  if (!out.empty()) opts.out = out;
  if (seed >= 0) opts.seed = seed;
  return rydcav::run(opts, std::cerr);
}
