#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace hmfx::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kSolverError = 3, kPartial = 4 };

struct Context {
  std::string command;
  RunConfig config;
  std::filesystem::path out;
  int jobs = 1;
  std::string tolerance_profile = "default";
  bool quiet = false;  // no status line on stdout
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& known_keys();
/// Multiplier applied to every default tolerance: strict 0.1, default 1, loose 10.
double tolerance_scale(const std::string& profile);

/// Runs one command and writes <out>/summary.json, also on failure.
int run_command(const Context& ctx);

/// Full command line: `hmfx <command> [--config PATH] [--out DIR] [--jobs N]
/// [--tolerance-profile P] [--set key=value ...] [--quiet]`.
int run_cli(std::vector<std::string> args);

}  // namespace hmfx::cli
