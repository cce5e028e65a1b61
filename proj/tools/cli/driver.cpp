#include "driver.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "urank/errors.hpp"

namespace urank::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kResultFiles[] = {"result.csv", "result.json", "meta.json"};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Json effective_config(Json config, const Overrides& overrides) {
  if (!config.is_object()) throw InvalidArgument("config must be a JSON object");
  if (overrides.seed) config["seed"] = *overrides.seed;
  if (overrides.out) config["out"] = *overrides.out;
  if (!config.contains("seed")) config["seed"] = std::uint64_t{0};
  if (!config.contains("out")) config["out"] = "urank-out";
  if (!config.at("out").is_string()) throw InvalidArgument("config: 'out' must be a string");
  return config;
}

std::string config_hash(const std::string& command, const Json& effective) {
  Json hashed = effective;
  hashed.erase("out");
  return fnv1a64_hex(command + '\n' + hashed.dump());
}

RunSummary execute(const std::string& command, const Json& config, const Overrides& overrides) {
  const Json effective = effective_config(config, overrides);
  const CommandConfig parsed = parse_config(command, effective);

  RunSummary summary;
  summary.hash = config_hash(command, effective);
  summary.dir = fs::path(effective.at("out").get<std::string>()) / command / summary.hash;
  if (!overrides.force) {
    for (const char* name : kResultFiles) {
      if (fs::exists(summary.dir / name)) {
        throw IoError("output exists: " + (summary.dir / name).string() + " (use --force to overwrite)");
      }
    }
  }

  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  summary.report = run_config(parsed, overrides.jobs);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;

  const Json meta = {{"command", command},
                     {"config_hash", summary.hash},
                     {"config", effective},
                     {"jobs", overrides.jobs},
                     {"started_at", utc_timestamp(started)},
                     {"wall_time_seconds", wall.count()}};

  std::error_code ec;
  fs::create_directories(summary.dir, ec);
  if (ec) throw IoError("cannot create " + summary.dir.string() + ": " + ec.message());
  write_file(summary.dir / "result.csv", summary.report.csv);
  write_file(summary.dir / "result.json", summary.report.result.dump(2) + '\n');
  write_file(summary.dir / "meta.json", meta.dump(2) + '\n');
  return summary;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e) != nullptr) return kConfigError;
  if (dynamic_cast<const UnsupportedModel*>(&e) != nullptr) return kConfigError;
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return kNumericalError;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kIoError;
  if (dynamic_cast<const ParseError*>(&e) != nullptr) return kIoError;
  if (dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr) return kConfigError;
  return kFailure;
}

namespace {

const char* category_of(int code) {
  switch (code) {
    case kConfigError:
      return "config";
    case kNumericalError:
      return "numerical";
    case kIoError:
      return "io";
    default:
      return "internal";
  }
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Pairwise ranking experiments: estimators, learners and bounds."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool force = false;
  std::size_t jobs = 1;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--seed", seed, "Base seed (overrides the config)");
  app.add_option("--out", out, "Output root directory (overrides the config)");
  app.add_flag("--force", force, "Overwrite existing result files");
  app.add_option("--jobs", jobs, "Worker threads")->envname("URANK_JOBS")->check(CLI::PositiveNumber);

  for (const auto& name : command_names()) app.add_subcommand(name, "Run the " + name + " experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  int code = kOk;
  try {
    Json config;
    {
      std::ifstream in(config_path);
      if (!in) throw InvalidArgument("cannot open config " + config_path);
      try {
        config = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("config " + config_path + " is not valid JSON: " + e.what());
      }
    }
    const RunSummary summary = execute(command, config, Overrides{seed, out, force, jobs});
    std::cout << summary.dir.string() << '\n';
  } catch (const std::exception& e) {
    code = exit_code_for(e);
    std::cerr << "urank " << command << ": " << category_of(code) << " error: " << e.what() << '\n';
  }
  return code;
}

}  // namespace urank::cli
