#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace histdirac::cli {

struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> files;  ///< relative to the output directory
  std::string summary;
};

/// Each command writes its outputs, the resolved config (config.txt) and a
/// manifest (manifest.json) into `out`.
CommandResult cmd_density(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_purity(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult cmd_tau(const RunConfig& cfg, const std::filesystem::path& out);
/// Exit code 1 when any check fails; the summary names the failing checks.
CommandResult cmd_verify(const RunConfig& cfg, const std::filesystem::path& out);

CommandResult dispatch(const std::string& command, const RunConfig& cfg, const std::filesystem::path& out);

}  // namespace histdirac::cli
