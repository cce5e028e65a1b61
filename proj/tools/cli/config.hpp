#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "urank/serialize.hpp"

namespace urank::cli {

// Typed field access for config objects. Every failure is an InvalidArgument
// naming the offending key.

const Json& required(const Json& j, const char* key, std::string_view context);

template <class T>
T get(const Json& j, const char* key, std::string_view context);

template <class T>
T get_or(const Json& j, const char* key, T fallback, std::string_view context) {
  return j.contains(key) ? get<T>(j, key, context) : fallback;
}

std::size_t get_size(const Json& j, const char* key, std::string_view context, std::size_t min_value);
std::size_t get_size_or(const Json& j, const char* key, std::size_t fallback, std::string_view context,
                        std::size_t min_value);

/// Where a command gets its sample from: a CSV/JSON file, or n draws from the
/// config's model with the run seed.
struct DataSpec {
  std::optional<std::filesystem::path> path;
  std::optional<SyntheticModel> model;
  std::size_t n = 0;

  [[nodiscard]] Dataset load(RngSeed seed) const;
};

/// Reads "data" (a path) or "model" + "n".
DataSpec parse_data_spec(const Json& config, std::string_view context);

/// Inline "scorer" object or "scorer_file", a JSON file holding either a
/// scorer or an object with a "scorer" key (the output of `train`).
struct ScorerSpec {
  std::optional<Json> inline_json;
  std::optional<std::filesystem::path> file;

  /// Reads the file if needed. The result is a scorer or kernel-expansion object.
  [[nodiscard]] Json resolve() const;
};

ScorerSpec parse_scorer_spec(const Json& config, std::string_view context);

/// True for {"type": "kernel_expansion", ...}.
bool is_kernel_expansion(const Json& j);

/// Pair kernel specs:
///   {"type": "ranking_loss", "scorer": {...}}
///   {"type": "excess_loss", "scorer": {...}}    (needs a model)
///   {"type": "constant", "value": c}
///   {"type": "degenerate", "kernel": {...}}     (h-hat of the inner kernel)
void validate_kernel_spec(const Json& spec);
PairKernel build_kernel(const Json& spec, const SyntheticModel* model);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a64_hex(std::string_view text);

Json read_json_file(const std::filesystem::path& path);

}  // namespace urank::cli
