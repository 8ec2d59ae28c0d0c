#pragma once

#include <filesystem>
#include <iosfwd>

#include "hxc/config.hpp"

namespace hxc {

enum ExitStatus : int {
  exit_ok = 0,
  exit_assertion = 1,
  exit_config = 2,
  exit_io = 3,
};

/// Runs cfg.command, writing artifacts into out_dir and one summary line per
/// check to console. Returns exit_ok iff every hard check passed. Throws
/// ConfigError / IoError for the caller to map to a status.
int run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& console);

/// The full command line: parses flags, loads and validates the config, runs,
/// and maps failures to exit statuses.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hxc
