#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plurikit/config.hpp"

namespace plurikit {

enum class ExitCode : int { ok = 0, config_error = 1, numeric_failure = 2, degenerate_saturation = 3 };

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> frames;
  std::optional<unsigned> threads;
  std::string out_dir;
};

struct RunResult {
  ExitCode code = ExitCode::ok;
  std::string message;
};

const std::vector<std::string>& command_names();
std::string usage_text();

//! Applies overrides, runs the command and writes its files. Never throws.
RunResult run_command(const std::string& command, const RunConfig& config, const RunOverrides& overrides);
RunResult run_command_file(const std::string& command, const std::filesystem::path& config_path,
                           const RunOverrides& overrides);

}  // namespace plurikit
