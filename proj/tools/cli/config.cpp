#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "urank/dataset_io.hpp"
#include "urank/errors.hpp"
#include "urank/ustat.hpp"

namespace urank::cli {

const Json& required(const Json& j, const char* key, std::string_view context) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string(context) + ": missing key '" + key + "'");
  }
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key, std::string_view context) {
  const Json& v = required(j, key, context);
  const auto wrong = [&]() {
    return InvalidArgument(std::string(context) + ": key '" + key + "' has the wrong type");
  };
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw wrong();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw wrong();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw wrong();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw wrong();
    if (std::is_unsigned_v<T> && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw wrong();
  }
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw wrong();
  }
}

template bool get<bool>(const Json&, const char*, std::string_view);
template double get<double>(const Json&, const char*, std::string_view);
template std::string get<std::string>(const Json&, const char*, std::string_view);
template std::uint64_t get<std::uint64_t>(const Json&, const char*, std::string_view);
template std::vector<double> get<std::vector<double>>(const Json&, const char*, std::string_view);

std::size_t get_size(const Json& j, const char* key, std::string_view context, std::size_t min_value) {
  const auto v = get<std::uint64_t>(j, key, context);
  if (v < min_value) {
    throw InvalidArgument(std::string(context) + ": '" + key + "' must be at least " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(v);
}

std::size_t get_size_or(const Json& j, const char* key, std::size_t fallback, std::string_view context,
                        std::size_t min_value) {
  return j.contains(key) ? get_size(j, key, context, min_value) : fallback;
}

Dataset DataSpec::load(RngSeed seed) const {
  if (path) return load_dataset(*path);
  return sample_dataset(*model, n, seed);
}

DataSpec parse_data_spec(const Json& config, std::string_view context) {
  DataSpec spec;
  if (config.contains("model")) spec.model = model_from_json(config.at("model"));
  if (config.contains("data")) {
    if (config.contains("n")) throw InvalidArgument(std::string(context) + ": give either 'data' or 'n', not both");
    spec.path = get<std::string>(config, "data", context);
    format_from_path(*spec.path);
    return spec;
  }
  if (!spec.model) throw InvalidArgument(std::string(context) + ": needs 'data' or 'model' with 'n'");
  spec.n = get_size(config, "n", context, 2);
  return spec;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Json ScorerSpec::resolve() const {
  if (inline_json) return *inline_json;
  Json j = read_json_file(*file);
  if (j.is_object() && j.contains("scorer")) j = j.at("scorer");
  if (!j.is_object()) throw ParseError(file->string() + ": no scorer object");
  return j;
}

bool is_kernel_expansion(const Json& j) {
  return j.is_object() && j.contains("type") && j.at("type") == "kernel_expansion";
}

ScorerSpec parse_scorer_spec(const Json& config, std::string_view context) {
  ScorerSpec spec;
  const bool has_inline = config.contains("scorer");
  const bool has_file = config.contains("scorer_file");
  if (has_inline == has_file) {
    throw InvalidArgument(std::string(context) + ": give exactly one of 'scorer' and 'scorer_file'");
  }
  if (has_inline) {
    const Json& j = config.at("scorer");
    if (is_kernel_expansion(j)) {
      kernel_expansion_from_json(j);
    } else {
      scorer_from_json(j);
    }
    spec.inline_json = j;
  } else {
    spec.file = get<std::string>(config, "scorer_file", context);
  }
  return spec;
}

void validate_kernel_spec(const Json& spec) {
  constexpr std::string_view ctx = "kernel";
  const auto type = get<std::string>(spec, "type", ctx);
  if (type == "ranking_loss" || type == "excess_loss") {
    require_keys(spec, {"type", "scorer"}, ctx);
    scorer_from_json(required(spec, "scorer", ctx));
  } else if (type == "constant") {
    require_keys(spec, {"type", "value"}, ctx);
    get<double>(spec, "value", ctx);
  } else if (type == "degenerate") {
    require_keys(spec, {"type", "kernel"}, ctx);
    validate_kernel_spec(required(spec, "kernel", ctx));
  } else {
    throw InvalidArgument("kernel: unknown type '" + type + "'");
  }
}

PairKernel build_kernel(const Json& spec, const SyntheticModel* model) {
  const auto type = spec.at("type").get<std::string>();
  if (type == "ranking_loss") return ranking_loss_kernel(RankingRule::from_scorer(scorer_from_json(spec.at("scorer"))));
  if (type == "constant") return constant_kernel(spec.at("value").get<double>());
  if (model == nullptr) throw InvalidArgument("kernel '" + type + "' needs a model");
  if (type == "excess_loss") {
    return excess_loss_kernel(RankingRule::from_scorer(scorer_from_json(spec.at("scorer"))), *model);
  }
  return KernelProjection(build_kernel(spec.at("kernel"), model), *model).degenerate_kernel();
}

std::string fnv1a64_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace urank::cli
