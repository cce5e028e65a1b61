#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/driver.hpp"
#include "urank/errors.hpp"

using namespace urank;
using namespace urank::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("urank_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "urank");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

const Json kStump = {{"type", "stump"}, {"dim", 0}, {"threshold", 1.0}, {"direction", 1}};

std::vector<std::pair<std::string, Json>> sample_configs() {
  return {
      {"generate", {{"model", "M1"}, {"n", 30}}},
      {"train", {{"learner", "stumps"}, {"model", "M1"}, {"n", 60}}},
      {"train", {{"learner", "boost"}, {"model", "M1"}, {"n", 60}, {"rounds", 5}, {"budget", "schedule"}}},
      {"train", {{"learner", "kernel"}, {"model", "M1"}, {"n", 15}, {"steps", 10}, {"cost", "hinge"}}},
      {"eval", {{"scorer", kStump}, {"model", "M1"}, {"n", 80}}},
      {"rates", {{"model", "M1"}, {"class", {{"type", "stumps"}}}, {"sizes", {20, 40}}, {"replicates", 4}}},
      {"variance", {{"model", "M1"}, {"kernel", {{"type", "ranking_loss"}, {"scorer", kStump}}}, {"n", 10},
                    {"replicates", 100}, {"bootstrap", 50}}},
      {"decompose", {{"model", "M1"}, {"kernel", {{"type", "ranking_loss"}, {"scorer", kStump}}}, {"n", 25}}},
      {"bounds", {{"mode", "ustat_tail"}, {"model", "M1"}, {"kernel", {{"type", "ranking_loss"}, {"scorer", kStump}}},
                  {"n", 10}, {"replicates", 100}}},
      {"roc", {{"scorer", kStump}, {"model", "M1"}, {"exact", true}}},
  };
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("every command is deterministic") {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  for (const auto& [cmd, cfg] : sample_configs()) {
    CAPTURE(cmd);
    const auto ra = execute(cmd, cfg, Overrides{std::uint64_t{5}, a.string(), false, 1});
    const auto rb = execute(cmd, cfg, Overrides{std::uint64_t{5}, b.string(), false, 1});
    CHECK(ra.hash == rb.hash);
    CHECK(slurp(ra.dir / "result.csv") == slurp(rb.dir / "result.csv"));
    CHECK(slurp(ra.dir / "result.json") == slurp(rb.dir / "result.json"));
    CHECK(fs::exists(ra.dir / "meta.json"));
  }
}

TEST_CASE("seed enters the hash, out does not") {
  const Json cfg = {{"model", "M1"}, {"n", 10}};
  const auto e0 = effective_config(cfg, Overrides{});
  CHECK(e0.at("seed").get<std::uint64_t>() == 0);
  CHECK(e0.at("out") == "urank-out");
  const auto e1 = effective_config(cfg, Overrides{std::uint64_t{1}, std::string("x"), false, 1});
  const auto e2 = effective_config(cfg, Overrides{std::uint64_t{1}, std::string("y"), false, 1});
  CHECK(config_hash("generate", e1) == config_hash("generate", e2));
  CHECK(config_hash("generate", e0) != config_hash("generate", e1));
  CHECK(config_hash("generate", e1) != config_hash("roc", e1));
  Json with_seed = cfg;
  with_seed["seed"] = 9;
  CHECK(effective_config(with_seed, Overrides{}).at("seed") == 9);
  CHECK(effective_config(with_seed, Overrides{std::uint64_t{3}, {}, false, 1}).at("seed") == 3);
}

TEST_CASE("existing output needs --force") {
  const auto dir = fresh_dir("force");
  const Json cfg = {{"model", "M1"}, {"n", 10}, {"out", dir.string()}};
  execute("generate", cfg, Overrides{});
  CHECK_THROWS_AS(execute("generate", cfg, Overrides{}), IoError);
  Overrides force;
  force.force = true;
  CHECK_NOTHROW(execute("generate", cfg, force));
}

TEST_CASE("exit codes through the entry point") {
  const auto dir = fresh_dir("exit");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto out = (dir / "out").string();
  const auto good = write("good.json", R"({"model": "M1", "n": 20})");
  CHECK(run_main({"--config", good, "--out", out, "generate"}) == kOk);
  CHECK(run_main({"--config", good, "--out", out, "generate"}) == kIoError);
  CHECK(run_main({"--config", good, "--out", out, "--force", "generate"}) == kOk);

  const auto bad = write("bad.json", R"({"model": "M1", "n": 20, "bogus": 1})");
  const auto bad_out = dir / "bad_out";
  CHECK(run_main({"--config", bad, "--out", bad_out.string(), "generate"}) == kConfigError);
  CHECK_FALSE(fs::exists(bad_out));

  const auto broken = write("broken.json", "{not json");
  CHECK(run_main({"--config", broken, "--out", out, "generate"}) == kConfigError);
  CHECK(run_main({"--config", (dir / "missing.json").string(), "--out", out, "generate"}) == kConfigError);
  CHECK(run_main({"--config", good, "nonsense"}) == kConfigError);
  CHECK(run_main({"--config", good, "--jobs", "0", "generate"}) == kConfigError);

  const auto missing_data = write("md.json", R"({"learner": "stumps", "data": "/nonexistent/d.csv"})");
  CHECK(run_main({"--config", missing_data, "--out", out, "train"}) == kIoError);

  const auto few = write("few.json",
                         R"({"model": "M1", "n": 10, "replicates": 99,
                             "kernel": {"type": "constant", "value": 1}})");
  CHECK(run_main({"--config", few, "--out", out, "variance"}) == kConfigError);
}

TEST_CASE("validation rejects bad configs without touching files") {
  CHECK_THROWS_AS(parse_config("train", Json{{"seed", 0}, {"learner", "forest"}, {"model", "M1"}, {"n", 5}}),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_config("train", Json{{"seed", 0}, {"learner", "stumps"}, {"data", "x.csv"}, {"n", 5}}),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_config("roc", Json{{"seed", 0}, {"scorer", kStump}, {"exact", true},
                                           {"model", {{"type", "noiseless"},
                                                      {"marginal", {{"type", "grid"}, {"lo", 0}, {"hi", 1}, {"size", 4}}},
                                                      {"m", {{"type", "constant"}, {"value", 1}}}}}}),
                  UnsupportedModel);
  CHECK_THROWS_AS(parse_config("eval", Json{{"seed", 0}, {"model", "M1"}, {"n", 5}}), InvalidArgument);
  CHECK_THROWS_AS(parse_config("nope", Json{{"seed", 0}}), InvalidArgument);
}

TEST_CASE("rates: singleton class and shared replicate seeds") {
  const Json constant = {{"type", "linear"}, {"w", {0.0}}};
  const Json cfg = {{"seed", 0},
                    {"model", "M1"},
                    {"class", {{"type", "finite"}, {"scorers", {constant}}}},
                    {"sizes", {10, 100, 1000}},
                    {"replicates", 2}};
  const auto r = run_config(parse_config("rates", cfg), 1);
  REQUIRE(r.result.at("slope").is_number());
  CHECK(r.result.at("slope").get<double>() == doctest::Approx(0.0).epsilon(1e-12));

  Json one = {{"seed", 4}, {"model", "M1"}, {"class", {{"type", "stumps"}}}, {"sizes", {30}}, {"replicates", 1}};
  Json many = one;
  many["replicates"] = 64;
  const auto a = run_config(parse_config("rates", one), 1);
  const auto b = run_config(parse_config("rates", many), 1);
  std::istringstream la(a.csv);
  std::istringstream lb(b.csv);
  std::string line_a;
  std::string line_b;
  for (int k = 0; k < 3; ++k) {
    std::getline(la, line_a);
    std::getline(lb, line_b);
    CHECK(line_a == line_b);
  }
}

TEST_CASE("roc, decompose and boost outputs") {
  const Json eta = {{"type", "table"}, {"points", {{0.0}, {1.0}, {2.0}}}, {"scores", {0.2, 0.5, 0.9}}};
  const Json perfect = {{"type", "linear"}, {"w", {1.0}}};
  const Json sep_model = {{"type", "bipartite"}, {"points", {{0.0}, {1.0}}}, {"probs", {0.5, 0.5}}, {"eta", {0.0, 1.0}}};
  const auto roc = run_config(parse_config("roc", Json{{"seed", 1}, {"scorer", perfect}, {"model", sep_model}, {"n", 50}}), 1);
  const auto& fpr = roc.result.at("curve").at("fpr");
  const auto& tpr = roc.result.at("curve").at("tpr");
  bool corner = false;
  for (std::size_t k = 0; k < fpr.size(); ++k) corner = corner || (fpr[k] == 0.0 && tpr[k] == 1.0);
  CHECK(corner);
  CHECK(roc.result.at("auc") == 1.0);
  const auto exact = run_config(parse_config("roc", Json{{"seed", 1}, {"scorer", eta}, {"model", "M1"}, {"exact", true}}), 1);
  CHECK(exact.result.at("curve").at("fpr").size() == 4);

  const Json degenerate = {{"type", "degenerate"}, {"kernel", {{"type", "ranking_loss"}, {"scorer", kStump}}}};
  const auto dec = run_config(parse_config("decompose", Json{{"seed", 2}, {"model", "M1"}, {"kernel", degenerate}, {"n", 30}}), 1);
  CHECK(dec.result.at("t_n") == 0.0);
  CHECK(dec.result.at("mean") == 0.0);

  const auto boost = run_config(
      parse_config("train", Json{{"seed", 3}, {"learner", "boost"}, {"model", "M1"}, {"n", 100}, {"rounds", 15}}), 1);
  double prev = boost.result.at("initial_objective").get<double>();
  for (const auto& round : boost.result.at("log")) {
    CHECK(round.at("objective").get<double>() <= prev);
    prev = round.at("objective").get<double>();
  }
}

}  // TEST_SUITE
