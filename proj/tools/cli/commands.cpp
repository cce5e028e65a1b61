#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "urank/bounds.hpp"
#include "urank/dataset_io.hpp"
#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/parallel.hpp"
#include "urank/risk.hpp"
#include "urank/roc.hpp"
#include "urank/ustat.hpp"

namespace urank::cli {
namespace {

RngSeed seed_of(const Json& config) { return RngSeed{get<std::uint64_t>(config, "seed", "config")}; }

std::optional<StumpGrid> parse_grid(const Json& config, std::string_view ctx) {
  if (!config.contains("grid")) return std::nullopt;
  const Json& g = config.at("grid");
  if (g.is_string()) {
    if (g.get<std::string>() != "data") throw InvalidArgument(std::string(ctx) + ": grid must be \"data\" or an object");
    return std::nullopt;
  }
  if (g.contains("thresholds")) {
    require_keys(g, {"thresholds"}, "grid");
    StumpGrid grid;
    try {
      grid.thresholds = g.at("thresholds").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception&) {
      throw InvalidArgument("grid: 'thresholds' must be a list of lists of numbers");
    }
    grid.normalize();
    return grid;
  }
  require_keys(g, {"lo", "hi", "cells"}, "grid");
  return StumpGrid::uniform(get<double>(g, "lo", "grid"), get<double>(g, "hi", "grid"),
                            get_size(g, "cells", "grid", 1));
}

CostFunction parse_cost(const Json& config) {
  return config.contains("cost") ? CostFunction::parse(get<std::string>(config, "cost", "config"))
                                 : CostFunction::exponential();
}

void require_finite_support(const SyntheticModel& model, std::string_view ctx) {
  if (!model.has_finite_support()) {
    throw UnsupportedModel(std::string(ctx) + ": the model needs a finite support");
  }
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string metrics_csv(const std::vector<std::pair<std::string, double>>& rows,
                        std::string_view header = "metric,value") {
  std::ostringstream out;
  out << header << '\n';
  for (const auto& [k, v] : rows) out << k << ',' << (std::isfinite(v) ? format_double(v) : std::string()) << '\n';
  return out.str();
}

Json metrics_json(const std::vector<std::pair<std::string, double>>& rows) {
  Json j = Json::object();
  for (const auto& [k, v] : rows) j[k] = nullable(v);
  return j;
}

bool bipartite_labels(std::span<const double> labels) {
  bool pos = false;
  bool neg = false;
  for (double y : labels) {
    if (y == 1.0) {
      pos = true;
    } else if (y == -1.0) {
      neg = true;
    } else {
      return false;
    }
  }
  return pos && neg;
}

// Percentile with linear interpolation between order statistics.
double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double sample_variance_of(const std::vector<double>& v) { return mean_variance(v).variance; }

std::vector<RankingRule> stump_class(const StumpGrid& grid) {
  std::vector<RankingRule> rules;
  for (std::size_t d = 0; d < grid.thresholds.size(); ++d) {
    for (double t : grid.thresholds[d]) {
      for (int dir : {1, -1}) rules.push_back(RankingRule::from_scorer(ScoringFunction(Stump{d, t, dir})));
    }
  }
  return rules;
}

// ---------------------------------------------------------------------------

GenerateConfig parse_generate(const Json& j) {
  require_keys(j, {"seed", "out", "model", "n"}, "generate");
  GenerateConfig c;
  c.model = model_from_json(required(j, "model", "generate"));
  c.n = get_size(j, "n", "generate", 1);
  c.seed = seed_of(j);
  return c;
}

TrainConfig parse_train(const Json& j) {
  constexpr std::string_view ctx = "train";
  TrainConfig c;
  const auto learner = get<std::string>(j, "learner", ctx);
  if (learner == "stumps") {
    c.learner = Learner::Stumps;
    require_keys(j, {"seed", "out", "learner", "data", "model", "n", "grid"}, ctx);
  } else if (learner == "boost") {
    c.learner = Learner::Boost;
    require_keys(j,
                 {"seed", "out", "learner", "data", "model", "n", "grid", "cost", "rounds", "budget", "step",
                  "fixed_step", "policy"},
                 ctx);
  } else if (learner == "kernel") {
    c.learner = Learner::Kernel;
    require_keys(j,
                 {"seed", "out", "learner", "data", "model", "n", "cost", "radius", "steps", "step0", "keep_best",
                  "bandwidth"},
                 ctx);
  } else {
    throw InvalidArgument("train: unknown learner '" + learner + "' (stumps, boost, kernel)");
  }
  c.data = parse_data_spec(j, ctx);
  c.seed = seed_of(j);
  c.grid = parse_grid(j, ctx);
  c.cost = parse_cost(j);
  c.rounds = get_size_or(j, "rounds", c.rounds, ctx, 1);
  if (j.contains("budget")) {
    if (j.at("budget").is_string()) {
      if (j.at("budget") != "schedule") throw InvalidArgument("train: budget must be a number or \"schedule\"");
      c.budget_schedule = true;
    } else {
      c.budget = get<double>(j, "budget", ctx);
      if (!(*c.budget > 0.0)) throw InvalidArgument("train: budget must be positive");
    }
  }
  if (j.contains("step")) {
    const auto step = get<std::string>(j, "step", ctx);
    if (step == "line_search") {
      c.step = StepRule::LineSearch;
    } else if (step == "fixed") {
      c.step = StepRule::Fixed;
    } else {
      throw InvalidArgument("train: step must be \"line_search\" or \"fixed\"");
    }
  }
  c.fixed_step = get_or<double>(j, "fixed_step", c.fixed_step, ctx);
  if (!(c.fixed_step > 0.0)) throw InvalidArgument("train: fixed_step must be positive");
  if (j.contains("policy")) {
    const auto policy = get<std::string>(j, "policy", ctx);
    if (policy == "clip") {
      c.policy = BudgetPolicy::Clip;
    } else if (policy == "stop") {
      c.policy = BudgetPolicy::Stop;
    } else if (policy == "rescale") {
      c.policy = BudgetPolicy::Rescale;
    } else {
      throw InvalidArgument("train: policy must be clip, stop or rescale");
    }
  }
  if (j.contains("radius")) {
    if (j.at("radius").is_string()) {
      if (j.at("radius") != "schedule") throw InvalidArgument("train: radius must be a number or \"schedule\"");
      c.radius_schedule = true;
    } else {
      c.radius = get<double>(j, "radius", ctx);
      if (!(c.radius > 0.0)) throw InvalidArgument("train: radius must be positive");
    }
  }
  c.steps = get_size_or(j, "steps", c.steps, ctx, 1);
  c.step0 = get_or<double>(j, "step0", c.step0, ctx);
  if (!(c.step0 > 0.0)) throw InvalidArgument("train: step0 must be positive");
  c.keep_best = get_or<bool>(j, "keep_best", c.keep_best, ctx);
  if (j.contains("bandwidth")) {
    c.bandwidth = get<double>(j, "bandwidth", ctx);
    if (!(*c.bandwidth > 0.0)) throw InvalidArgument("train: bandwidth must be positive");
  }
  return c;
}

EvalConfig parse_eval(const Json& j) {
  require_keys(j, {"seed", "out", "scorer", "scorer_file", "data", "model", "n", "cost"}, "eval");
  return {parse_scorer_spec(j, "eval"), parse_data_spec(j, "eval"), seed_of(j), parse_cost(j)};
}

RatesConfig parse_rates(const Json& j) {
  constexpr std::string_view ctx = "rates";
  require_keys(j, {"seed", "out", "model", "class", "sizes", "replicates", "require_bayes_in_class"}, ctx);
  RatesConfig c;
  c.model = model_from_json(required(j, "model", ctx));
  require_finite_support(c.model, ctx);
  const Json& cls = required(j, "class", ctx);
  const auto type = get<std::string>(cls, "type", "class");
  if (type == "stumps") {
    require_keys(cls, {"type", "grid"}, "class");
    c.kind = RatesConfig::ClassKind::Stumps;
    c.grid = parse_grid(cls, "class");
  } else if (type == "finite") {
    require_keys(cls, {"type", "scorers"}, "class");
    c.kind = RatesConfig::ClassKind::Finite;
    const Json& list = required(cls, "scorers", "class");
    if (!list.is_array() || list.empty()) throw InvalidArgument("class: 'scorers' must be a non-empty list");
    for (const auto& s : list) c.scorers.push_back(scorer_from_json(s));
  } else {
    throw InvalidArgument("class: unknown type '" + type + "' (stumps, finite)");
  }
  const Json& sizes = required(j, "sizes", ctx);
  if (!sizes.is_array() || sizes.empty()) throw InvalidArgument("rates: 'sizes' must be a non-empty list");
  for (const auto& s : sizes) {
    if (!s.is_number_integer() || s.get<std::int64_t>() < 2) {
      throw InvalidArgument("rates: every size must be an integer >= 2");
    }
    c.sizes.push_back(s.get<std::size_t>());
  }
  c.replicates = get_size(j, "replicates", ctx, 1);
  c.seed = seed_of(j);
  c.require_bayes_in_class = get_or<bool>(j, "require_bayes_in_class", false, ctx);
  if (c.require_bayes_in_class && c.kind == RatesConfig::ClassKind::Stumps && !c.grid) {
    throw InvalidArgument("rates: require_bayes_in_class needs a fixed stump grid");
  }
  return c;
}

VarianceConfig parse_variance(const Json& j) {
  constexpr std::string_view ctx = "variance";
  require_keys(j, {"seed", "out", "model", "kernel", "n", "replicates", "bootstrap"}, ctx);
  VarianceConfig c;
  c.model = model_from_json(required(j, "model", ctx));
  c.kernel = required(j, "kernel", ctx);
  validate_kernel_spec(c.kernel);
  c.n = get_size(j, "n", ctx, 2);
  c.replicates = get_size(j, "replicates", ctx, 100);
  c.bootstrap = get_size_or(j, "bootstrap", c.bootstrap, ctx, 10);
  c.seed = seed_of(j);
  return c;
}

DecomposeConfig parse_decompose(const Json& j) {
  constexpr std::string_view ctx = "decompose";
  require_keys(j, {"seed", "out", "model", "kernel", "data", "n", "mc_inner"}, ctx);
  DecomposeConfig c;
  c.model = model_from_json(required(j, "model", ctx));
  c.kernel = required(j, "kernel", ctx);
  validate_kernel_spec(c.kernel);
  c.data = parse_data_spec(j, ctx);
  c.seed = seed_of(j);
  c.mc_inner = get_size_or(j, "mc_inner", c.mc_inner, ctx, 2);
  return c;
}

BoundsConfig parse_bounds(const Json& j) {
  constexpr std::string_view ctx = "bounds";
  BoundsConfig c;
  const auto mode = get<std::string>(j, "mode", ctx);
  if (mode == "ustat_tail") {
    c.mode = BoundsConfig::Mode::UstatTail;
    require_keys(j, {"seed", "out", "mode", "model", "kernel", "n", "replicates", "t", "c"}, ctx);
    c.kernels.push_back(required(j, "kernel", ctx));
  } else if (mode == "moment_tail") {
    c.mode = BoundsConfig::Mode::MomentTail;
    require_keys(j, {"seed", "out", "mode", "model", "kernels", "n", "replicates", "t", "c"}, ctx);
    const Json& list = required(j, "kernels", ctx);
    if (!list.is_array() || list.empty()) throw InvalidArgument("bounds: 'kernels' must be a non-empty list");
    for (const auto& k : list) c.kernels.push_back(k);
  } else if (mode == "rademacher") {
    c.mode = BoundsConfig::Mode::Rademacher;
    require_keys(j, {"seed", "out", "mode", "model", "n", "grid", "draws", "exact"}, ctx);
  } else {
    throw InvalidArgument("bounds: unknown mode '" + mode + "' (ustat_tail, moment_tail, rademacher)");
  }
  c.model = model_from_json(required(j, "model", ctx));
  for (const auto& k : c.kernels) validate_kernel_spec(k);
  c.n = get_size_or(j, "n", c.n, ctx, 2);
  c.replicates = get_size_or(j, "replicates", c.replicates, ctx, 1);
  c.t = get_or<std::vector<double>>(j, "t", {}, ctx);
  for (double t : c.t) {
    if (!(t > 0.0)) throw InvalidArgument("bounds: every t must be positive");
  }
  c.c = get_or<double>(j, "c", c.c, ctx);
  if (!(c.c > 0.0)) throw InvalidArgument("bounds: c must be positive");
  c.seed = seed_of(j);
  c.grid = parse_grid(j, ctx);
  c.draws = get_size_or(j, "draws", c.draws, ctx, 1);
  c.exact = get_or<bool>(j, "exact", false, ctx);
  if (c.mode == BoundsConfig::Mode::MomentTail && c.replicates < 100) {
    throw InvalidArgument("bounds: moment_tail needs at least 100 replicates");
  }
  return c;
}

RocConfig parse_roc(const Json& j) {
  constexpr std::string_view ctx = "roc";
  require_keys(j, {"seed", "out", "scorer", "scorer_file", "data", "model", "n", "exact"}, ctx);
  RocConfig c;
  c.scorer = parse_scorer_spec(j, ctx);
  if (c.scorer.inline_json && is_kernel_expansion(*c.scorer.inline_json)) {
    throw InvalidArgument("roc: needs a scoring function, not a pair scorer");
  }
  c.seed = seed_of(j);
  c.exact = get_or<bool>(j, "exact", false, ctx);
  if (c.exact) {
    if (j.contains("data") || j.contains("n")) throw InvalidArgument("roc: exact mode takes no 'data' or 'n'");
    c.model = model_from_json(required(j, "model", ctx));
    if (c.model->bipartite() == nullptr) throw UnsupportedModel("roc: exact mode needs a bipartite model");
  } else {
    c.data = parse_data_spec(j, ctx);
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"generate", "train",     "eval",   "rates",
                                                 "variance", "decompose", "bounds", "roc"};
  return names;
}

CommandConfig parse_config(const std::string& command, const Json& config) {
  if (!config.is_object()) throw InvalidArgument("config must be a JSON object");
  if (command == "generate") return parse_generate(config);
  if (command == "train") return parse_train(config);
  if (command == "eval") return parse_eval(config);
  if (command == "rates") return parse_rates(config);
  if (command == "variance") return parse_variance(config);
  if (command == "decompose") return parse_decompose(config);
  if (command == "bounds") return parse_bounds(config);
  if (command == "roc") return parse_roc(config);
  throw InvalidArgument("unknown command '" + command + "'");
}

Report run_config(const CommandConfig& config, std::size_t jobs) {
  return std::visit(
      [jobs](const auto& c) -> Report {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GenerateConfig>) return run_generate(c);
        if constexpr (std::is_same_v<T, TrainConfig>) return run_train(c);
        if constexpr (std::is_same_v<T, EvalConfig>) return run_eval(c);
        if constexpr (std::is_same_v<T, RatesConfig>) return run_rates(c, jobs);
        if constexpr (std::is_same_v<T, VarianceConfig>) return run_variance(c, jobs);
        if constexpr (std::is_same_v<T, DecomposeConfig>) return run_decompose(c);
        if constexpr (std::is_same_v<T, BoundsConfig>) return run_bounds(c, jobs);
        if constexpr (std::is_same_v<T, RocConfig>) return run_roc(c);
      },
      config);
}

Report run_generate(const GenerateConfig& c) {
  const Dataset data = sample_dataset(c.model, c.n, c.seed);
  std::ostringstream csv;
  write_csv(csv, data);
  const auto labels = data.labels();
  Report r;
  r.csv = csv.str();
  r.result = {{"n", data.size()},
              {"dim", data.dim()},
              {"seed", c.seed.value},
              {"model", c.model.kind()},
              {"label_mean", compensated_total(labels) / static_cast<double>(data.size())}};
  return r;
}

Report run_train(const TrainConfig& c) {
  const Dataset data = c.data.load(c.seed);
  data.require_pairs("train");
  Report r;
  std::ostringstream csv;
  switch (c.learner) {
    case Learner::Stumps: {
      const StumpFit fit = erm_stumps(data, c.grid ? *c.grid : StumpGrid::from_data(data));
      r.result = {{"learner", "stumps"},
                  {"n", data.size()},
                  {"scorer", to_json(ScoringFunction(fit.stump))},
                  {"empirical_risk", fit.risk},
                  {"mistakes", fit.mistakes}};
      csv << "dim,threshold,direction,empirical_risk,mistakes\n"
          << fit.stump.dim << ',' << format_double(fit.stump.threshold) << ',' << fit.stump.direction << ','
          << format_double(fit.risk) << ',' << fit.mistakes << '\n';
      break;
    }
    case Learner::Boost: {
      BoostConfig cfg;
      cfg.rounds = c.rounds;
      cfg.base = c.grid ? *c.grid : StumpGrid::from_data(data);
      cfg.budget = c.budget_schedule ? std::optional<double>(budget_schedule(c.cost, data.size())) : c.budget;
      cfg.step = c.step;
      cfg.fixed_step = c.fixed_step;
      cfg.policy = c.policy;
      const BoostResult result = boost_rank(data, cfg, c.cost);
      r.result = to_json(result);
      r.result["learner"] = "boost";
      r.result["cost"] = c.cost.name();
      r.result["budget"] = cfg.budget ? Json(*cfg.budget) : Json(nullptr);
      write_csv(csv, result);
      break;
    }
    case Learner::Kernel: {
      KernelConfig cfg;
      if (c.bandwidth) cfg.kernel = FeatureKernel(GaussianKernel{*c.bandwidth});
      cfg.radius = c.radius_schedule ? budget_schedule(c.cost, data.size()) : c.radius;
      cfg.steps = c.steps;
      cfg.step0 = c.step0;
      cfg.keep_best = c.keep_best;
      const KernelResult result = kernel_rank(data, cfg, c.cost);
      r.result = {{"learner", "kernel"},
                  {"cost", c.cost.name()},
                  {"radius", cfg.radius},
                  {"bandwidth", result.bandwidth},
                  {"scorer", to_json(result.f)},
                  {"rkhs_norm", result.f.rkhs_norm()},
                  {"final_objective", result.final_objective}};
      csv << "step,objective,norm_sq\n";
      for (std::size_t t = 0; t < result.objective.size(); ++t) {
        csv << t + 1 << ',' << format_double(result.objective[t]) << ',' << format_double(result.norm_sq[t]) << '\n';
      }
      break;
    }
  }
  r.csv = csv.str();
  return r;
}

Report run_eval(const EvalConfig& c) {
  const Json scorer_json = c.scorer.resolve();
  const Dataset data = c.data.load(c.seed);
  data.require_pairs("eval");
  const SyntheticModel* model = c.data.model ? &*c.data.model : nullptr;
  const bool exact = model != nullptr && model->has_finite_support();
  std::vector<std::pair<std::string, double>> m;
  m.emplace_back("n", static_cast<double>(data.size()));

  if (is_kernel_expansion(scorer_json)) {
    const PairScorer f(kernel_expansion_from_json(scorer_json));
    const RankingRule rule(FromPairScorer{f});
    m.emplace_back("empirical_risk", empirical_risk(rule, data));
    m.emplace_back("empirical_cost", empirical_cost(f, data, c.cost));
    if (exact) {
      const double risk = true_risk(rule, *model);
      const double bayes = bayes_risk(*model);
      m.emplace_back("true_risk", risk);
      m.emplace_back("bayes_risk", bayes);
      m.emplace_back("excess_risk", risk - bayes);
    }
  } else {
    const ScoringFunction s = scorer_from_json(scorer_json);
    const auto scores = scores_of(s, data);
    const auto labels = data.labels();
    m.emplace_back("empirical_risk", empirical_risk(scores, labels));
    m.emplace_back("empirical_cost", empirical_cost(PairScorer(s), data, c.cost));
    if (bipartite_labels(labels)) m.emplace_back("auc", auc(scores, labels));
    if (exact) {
      m.emplace_back("true_risk", true_risk(RankingRule::from_scorer(s), *model));
      m.emplace_back("bayes_risk", bayes_risk(*model));
      m.emplace_back("excess_risk", excess_risk(s, *model));
      if (model->bipartite() != nullptr) m.emplace_back("true_auc", true_auc(*model, s));
    }
  }
  return {{{"cost", c.cost.name()}, {"metrics", metrics_json(m)}}, metrics_csv(m)};
}

Report run_rates(const RatesConfig& c, std::size_t jobs) {
  const PairLaw law(c.model);
  const double bayes = law.bayes_risk();

  std::optional<StumpExcessTable> table;
  std::vector<RankingRule> rules;
  std::vector<double> member_excess;
  if (c.kind == RatesConfig::ClassKind::Stumps) {
    table.emplace(law);
    if (c.require_bayes_in_class) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < c.grid->thresholds.size(); ++d) {
        for (double t : c.grid->thresholds[d]) {
          for (int dir : {1, -1}) best = std::min(best, table->excess(Stump{d, t, dir}));
        }
      }
      if (best > 1e-12) throw InvalidArgument("rates: the stump class does not contain the Bayes rule");
    }
  } else {
    for (const auto& s : c.scorers) {
      std::vector<double> atom_scores;
      for (const auto& p : law.points()) atom_scores.push_back(s(p));
      member_excess.push_back(law.excess_from_scores(atom_scores));
      rules.push_back(RankingRule::from_scorer(s));
    }
    if (c.require_bayes_in_class && *std::min_element(member_excess.begin(), member_excess.end()) > 1e-12) {
      throw InvalidArgument("rates: the class does not contain the Bayes rule");
    }
  }

  const std::size_t reps = c.replicates;
  const std::size_t cells = c.sizes.size() * reps;
  std::vector<double> excess(cells);
  std::vector<double> emp(cells);
  parallel_for(cells, jobs, [&](std::size_t cell) {
    const std::size_t n = c.sizes[cell / reps];
    const std::size_t rep = cell % reps;
    const Dataset data = sample_dataset(c.model, n, replicate_seed(c.seed, rep));
    if (c.kind == RatesConfig::ClassKind::Stumps) {
      const StumpFit fit = erm_stumps(data, c.grid ? *c.grid : StumpGrid::from_data(data));
      excess[cell] = table->excess(fit.stump);
      emp[cell] = fit.risk;
    } else {
      const ErmResult fit = erm_finite(rules, data);
      excess[cell] = member_excess[fit.index];
      emp[cell] = fit.risk;
    }
  });

  std::ostringstream csv;
  csv << "n,replicate,estimator,value\n";
  std::vector<double> sizes;
  std::vector<double> means;
  Json cells_json = Json::array();
  for (std::size_t i = 0; i < c.sizes.size(); ++i) {
    const std::span<const double> ex(excess.data() + i * reps, reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::size_t cell = i * reps + rep;
      csv << c.sizes[i] << ',' << rep << ",empirical_risk," << format_double(emp[cell]) << '\n';
      csv << c.sizes[i] << ',' << rep << ",excess_risk," << format_double(excess[cell]) << '\n';
    }
    const auto mv = mean_variance(ex);
    const double se = reps > 1 ? std::sqrt(mv.variance / static_cast<double>(reps)) : 0.0;
    sizes.push_back(static_cast<double>(c.sizes[i]));
    means.push_back(mv.mean);
    cells_json.push_back({{"n", c.sizes[i]}, {"mean_excess", mv.mean}, {"std_error", se}});
  }
  const auto slope = log_log_slope(sizes, means);
  Report r;
  r.csv = csv.str();
  r.result = {{"bayes_risk", bayes},
              {"replicates", reps},
              {"cells", cells_json},
              {"slope", slope ? Json(*slope) : Json(nullptr)}};
  return r;
}

Report run_variance(const VarianceConfig& c, std::size_t jobs) {
  const PairKernel q = build_kernel(c.kernel, &c.model);
  const std::size_t reps = c.replicates;
  std::vector<double> u(reps);
  std::vector<double> split(reps);
  parallel_for(reps, jobs, [&](std::size_t rep) {
    const Dataset data = sample_dataset(c.model, c.n, replicate_seed(c.seed, rep));
    u[rep] = u_stat(q, data);
    split[rep] = split_estimate(q, data);
  });

  const auto mu = mean_variance(u);
  const auto ms = mean_variance(split);
  const double ratio = ms.variance > 0.0 ? mu.variance / ms.variance : std::numeric_limits<double>::quiet_NaN();

  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = lo;
  if (ms.variance > 0.0) {
    Rng rng(replicate_seed(c.seed, reps));
    std::vector<double> ratios;
    std::vector<double> bu(reps);
    std::vector<double> bs(reps);
    for (std::size_t b = 0; b < c.bootstrap; ++b) {
      for (std::size_t k = 0; k < reps; ++k) {
        const std::size_t idx = rng.index(reps);
        bu[k] = u[idx];
        bs[k] = split[idx];
      }
      const double vs = sample_variance_of(bs);
      if (vs > 0.0) ratios.push_back(sample_variance_of(bu) / vs);
    }
    if (!ratios.empty()) {
      lo = quantile(ratios, 0.025);
      hi = quantile(ratios, 0.975);
    }
  }

  std::ostringstream csv;
  csv << "replicate,u_stat,split\n";
  for (std::size_t k = 0; k < reps; ++k) csv << k << ',' << format_double(u[k]) << ',' << format_double(split[k]) << '\n';
  Report r;
  r.csv = csv.str();
  r.result = {{"n", c.n},
              {"replicates", reps},
              {"bootstrap", c.bootstrap},
              {"mean_u", mu.mean},
              {"mean_split", ms.mean},
              {"var_u", mu.variance},
              {"var_split", ms.variance},
              {"ratio", nullable(ratio)},
              {"ci_low", nullable(lo)},
              {"ci_high", nullable(hi)}};
  return r;
}

Report run_decompose(const DecomposeConfig& c) {
  const PairKernel q = build_kernel(c.kernel, &c.model);
  const Dataset data = c.data.load(c.seed);
  const HoeffdingParts parts = hoeffding_decompose(q, data, c.model, ProjectionOptions{c.mc_inner, c.seed});
  const double residual = parts.u_n - (parts.mean + 2.0 * parts.t_n + parts.w_n);
  Report r;
  r.result = to_json(parts);
  r.result["residual"] = residual;
  r.result["n"] = data.size();
  r.csv = metrics_csv({{"mean", parts.mean},
                       {"u_n", parts.u_n},
                       {"t_n", parts.t_n},
                       {"w_n", parts.w_n},
                       {"residual", residual}},
                      "quantity,value");
  return r;
}

Report run_bounds(const BoundsConfig& c, std::size_t jobs) {
  Report r;
  std::ostringstream csv;
  if (c.mode == BoundsConfig::Mode::Rademacher) {
    const Dataset data = sample_dataset(c.model, c.n, c.seed);
    const auto rules = stump_class(c.grid ? *c.grid : StumpGrid::from_data(data));
    const RademacherEstimate est = c.exact ? rademacher_exact(rules, data) : rademacher_mc(rules, data, c.draws, c.seed);
    const std::vector<std::pair<std::string, double>> rows = {{"value", est.value},
                                                              {"std_error", est.std_error},
                                                              {"draws", static_cast<double>(est.draws)},
                                                              {"class_size", static_cast<double>(rules.size())}};
    r.result = metrics_json(rows);
    r.result["exact"] = est.exact;
    r.csv = metrics_csv(rows);
    return r;
  }
  TailOptions opts;
  opts.n = c.n;
  opts.replicates = c.replicates;
  opts.seed = c.seed;
  opts.t = c.t;
  opts.c = c.c;
  opts.jobs = jobs;
  std::vector<PairKernel> kernels;
  for (const auto& k : c.kernels) kernels.push_back(build_kernel(k, &c.model));
  const TailReport report = c.mode == BoundsConfig::Mode::UstatTail
                                ? ustat_tail_harness(kernels.front(), c.model, opts)
                                : moment_tail_harness(kernels, c.model, opts);
  r.result = to_json(report);
  write_csv(csv, report);
  r.csv = csv.str();
  return r;
}

Report run_roc(const RocConfig& c) {
  const Json scorer_json = c.scorer.resolve();
  if (is_kernel_expansion(scorer_json)) throw InvalidArgument("roc: needs a scoring function, not a pair scorer");
  const ScoringFunction s = scorer_from_json(scorer_json);
  Report r;
  RocCurve curve;
  if (c.exact) {
    curve = true_roc(*c.model, s);
    r.result = {{"exact", true}, {"auc", true_auc(*c.model, s)}};
  } else {
    const Dataset data = c.data->load(c.seed);
    const auto scores = scores_of(s, data);
    const auto labels = data.labels();
    curve = roc_curve(scores, labels);
    r.result = {{"exact", false}, {"auc", auc(scores, labels)}, {"n", data.size()}};
  }
  r.result["curve"] = to_json(curve);
  std::ostringstream csv;
  write_csv(csv, curve);
  r.csv = csv.str();
  return r;
}

std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double mx = compensated_total(lx) / static_cast<double>(lx.size());
  const double my = compensated_total(ly) / static_cast<double>(ly.size());
  CompensatedSum sxy;
  CompensatedSum sxx;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy.add((lx[i] - mx) * (ly[i] - my));
    sxx.add((lx[i] - mx) * (lx[i] - mx));
  }
  if (sxx.value() == 0.0) return std::nullopt;
  return sxy.value() / sxx.value();
}

}  // namespace urank::cli
