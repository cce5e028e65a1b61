#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "commands.hpp"

namespace urank::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNumericalError = 3,
  kIoError = 4,
};

/// Command-line settings that override or complement the config document.
/// Precedence: flag, then config field, then default.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool force = false;
  std::size_t jobs = 1;
};

/// The config with flag overrides applied and the seed filled in (default 0).
/// "out" stays in the document but does not enter the hash.
Json effective_config(Json config, const Overrides& overrides);

/// FNV-1a hash of the command and the effective config without "out".
std::string config_hash(const std::string& command, const Json& effective);

struct RunSummary {
  std::filesystem::path dir;
  std::string hash;
  Report report;
};

/// Validates, checks the output directory, runs the command and writes
/// <out>/<command>/<hash>/{result.csv, result.json, meta.json}.
RunSummary execute(const std::string& command, const Json& config, const Overrides& overrides);

/// Maps an exception to the exit code of its category.
int exit_code_for(const std::exception& e);

/// Entry point of the `urank` executable.
int main_entry(int argc, char** argv);

}  // namespace urank::cli
