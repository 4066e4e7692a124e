#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rydcav {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNoConvergence = 4,
};

struct RunOptions {
  std::string command;  ///< simulate-rabi | simulate-ramsey | fit-rabi | fit-ramsey | resonator-response | synth
  std::filesystem::path config;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> out;
  std::optional<long long> seed;
  int threads = 0;
  bool verbose = false;
};

const std::vector<std::string>& commands();

/// Executes one command and returns its exit code. Output tables and
/// metadata.json land in the output directory (--out, else output.dir,
/// else the working directory). Diagnostics go to `log`.
int run(const RunOptions& options, std::ostream& log);

}  // namespace rydcav
