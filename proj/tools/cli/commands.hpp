#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"
#include "urank/cost.hpp"
#include "urank/learners.hpp"

namespace urank::cli {

/// What a command produces: the two deterministic result files.
struct Report {
  Json result;
  std::string csv;
};

struct GenerateConfig {
  SyntheticModel model = model_m1();
  std::size_t n = 0;
  RngSeed seed;
};

enum class Learner { Stumps, Boost, Kernel };

struct TrainConfig {
  Learner learner = Learner::Stumps;
  DataSpec data;
  RngSeed seed;
  std::optional<StumpGrid> grid;  ///< from the data when unset
  CostFunction cost = CostFunction::exponential();
  // boost
  std::size_t rounds = 20;
  std::optional<double> budget;
  bool budget_schedule = false;
  StepRule step = StepRule::LineSearch;
  double fixed_step = 0.5;
  BudgetPolicy policy = BudgetPolicy::Clip;
  // kernel
  double radius = 1.0;
  bool radius_schedule = false;
  std::size_t steps = 200;
  double step0 = 1.0;
  bool keep_best = true;
  std::optional<double> bandwidth;
};

struct EvalConfig {
  ScorerSpec scorer;
  DataSpec data;
  RngSeed seed;
  CostFunction cost = CostFunction::exponential();
};

struct RatesConfig {
  SyntheticModel model = model_m1();
  enum class ClassKind { Stumps, Finite } kind = ClassKind::Stumps;
  std::optional<StumpGrid> grid;           ///< stumps: fixed grid, else from each sample
  std::vector<ScoringFunction> scorers;    ///< finite class
  std::vector<std::size_t> sizes;
  std::size_t replicates = 1;
  RngSeed seed;
  bool require_bayes_in_class = false;
};

struct VarianceConfig {
  SyntheticModel model = model_m1();
  Json kernel;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t bootstrap = 1000;
  RngSeed seed;
};

struct DecomposeConfig {
  SyntheticModel model = model_m1();
  Json kernel;
  DataSpec data;
  RngSeed seed;
  std::size_t mc_inner = 10000;
};

struct BoundsConfig {
  enum class Mode { UstatTail, MomentTail, Rademacher } mode = Mode::UstatTail;
  SyntheticModel model = model_m1();
  std::vector<Json> kernels;
  std::size_t n = 40;
  std::size_t replicates = 10000;
  std::vector<double> t;
  double c = 1.0;
  RngSeed seed;
  // rademacher
  std::optional<StumpGrid> grid;
  std::size_t draws = 1000;
  bool exact = false;
};

struct RocConfig {
  ScorerSpec scorer;
  std::optional<DataSpec> data;
  std::optional<SyntheticModel> model;
  RngSeed seed;
  bool exact = false;
};

using CommandConfig = std::variant<GenerateConfig, TrainConfig, EvalConfig, RatesConfig, VarianceConfig,
                                   DecomposeConfig, BoundsConfig, RocConfig>;

/// Names accepted on the command line, in display order.
const std::vector<std::string>& command_names();

/// Schema validation; throws InvalidArgument / UnsupportedModel. `config` must
/// already hold the effective seed. Touches no files.
CommandConfig parse_config(const std::string& command, const Json& config);

/// Runs a validated command. Reads input files if the config names any; never
/// writes.
Report run_config(const CommandConfig& config, std::size_t jobs);

/// The individual runners, also used directly by the acceptance suite.
Report run_generate(const GenerateConfig& c);
Report run_train(const TrainConfig& c);
Report run_eval(const EvalConfig& c);
Report run_rates(const RatesConfig& c, std::size_t jobs);
Report run_variance(const VarianceConfig& c, std::size_t jobs);
Report run_decompose(const DecomposeConfig& c);
Report run_bounds(const BoundsConfig& c, std::size_t jobs);
Report run_roc(const RocConfig& c);

/// Least-squares slope of log(y) against log(x) over the points with y > 0;
/// nullopt with fewer than two such points.
std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace urank::cli
