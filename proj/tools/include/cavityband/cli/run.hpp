#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavityband/cli/config.hpp"
#include "cavityband/parallel.hpp"
#include "json.hpp"

namespace cavityband::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_inconclusive = 3, exit_internal = 4 };

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, bytes
  nlohmann::json diagnostics = nlohmann::json::object();
  bool inconclusive = false;
};

// Pure computation for one config; no file system access.
Artifacts compute(const RunConfig& cfg, const Execution& ex);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<unsigned> workers;  // overrides the config
  bool no_plots = false;
  bool no_cache = false;
};

std::string config_hash(const RunConfig& cfg);

// Runs, writes <out>/<command>.csv, optional .svg and manifest.json.
// Messages go to `log`. Returns an ExitCode.
int run(RunConfig cfg, const RunOptions& opt, std::ostream& log);

// Full command-line entry point.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cavityband::cli
