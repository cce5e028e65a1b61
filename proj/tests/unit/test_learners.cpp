#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fixtures.hpp"
#include "urank/errors.hpp"
#include "urank/learners.hpp"
#include "urank/risk.hpp"
#include "urank/roc.hpp"
#include "urank/ustat.hpp"

using namespace urank;

namespace {

Dataset line_data(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<LabeledSample> s;
  for (std::size_t i = 0; i < x.size(); ++i) s.push_back({{x[i]}, y[i]});
  return Dataset(std::move(s));
}

Dataset integer_data(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<LabeledSample> s;
  for (std::size_t i = 0; i < n; ++i) {
    Point x(dim);
    for (auto& v : x) v = static_cast<double>(rng.index(7));
    s.push_back({x, static_cast<double>(rng.index(3))});
  }
  return Dataset(dim, std::move(s));
}

RankingRule stump_rule(std::size_t dim, double t, int dir) {
  return RankingRule::from_scorer(ScoringFunction(Stump{dim, t, dir}));
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("erm_finite picks the lowest index among ties") {
  const auto d = line_data({0, 1, 2, 3}, {1, 1, -1, -1});
  const std::vector<RankingRule> rules = {stump_rule(0, 2.0, 1), stump_rule(0, 2.0, -1), stump_rule(0, 1.0, -1),
                                          stump_rule(0, 2.0, -1)};
  const auto r = erm_finite(rules, d);
  CHECK(r.index == 1);
  CHECK(r.risk == 0.0);
  const std::vector<RankingRule> one = {stump_rule(0, 2.0, 1)};
  const auto s = erm_finite(one, d);
  CHECK(s.index == 0);
  CHECK(s.risk == doctest::Approx(empirical_risk(one[0], d)));
  CHECK_THROWS_AS(erm_finite(std::span<const RankingRule>{}, d), InvalidArgument);
}

TEST_CASE("stump sweep agrees with brute force") {
  Rng rng(RngSeed{21});
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng.index(40);
    const auto d = integer_data(rng, n, 1 + rng.index(3));
    const auto grid = StumpGrid::from_data(d);
    const auto fast = erm_stumps(d, grid);
    const auto slow = erm_stumps_brute(d, grid);
    CHECK(fast.risk == doctest::Approx(slow.risk).epsilon(1e-14));
    CHECK(fast.mistakes == slow.mistakes);
    CHECK(fast.stump == slow.stump);
    CHECK(empirical_risk(RankingRule::from_scorer(ScoringFunction(fast.stump)), d) ==
          doctest::Approx(fast.risk).epsilon(1e-14));
  }
}

TEST_CASE("stumps on separable data and a single threshold") {
  const auto d = line_data({0, 1, 2, 3, 4}, {-1, -1, 1, 1, 1});
  const auto fit = erm_stumps(d, StumpGrid::from_data(d));
  CHECK(fit.risk == 0.0);
  CHECK(fit.mistakes == 0);

  StumpGrid one{{{2.5}}};
  const auto f = erm_stumps(d, one);
  CHECK(f.stump.threshold == 2.5);
  CHECK(f.risk == doctest::Approx(empirical_risk(stump_rule(0, 2.5, f.stump.direction), d)));
  CHECK_THROWS_AS(erm_stumps(d, StumpGrid{{{}}}), InvalidArgument);
  CHECK_THROWS_AS(StumpGrid::uniform(1.0, 0.0, 4), InvalidArgument);
  CHECK(StumpGrid::uniform(0.0, 1.0, 4).size() == 5);
}

TEST_CASE("stump ERM on M1 concentrates around the Bayes risk") {
  const auto m1 = model_m1();
  const auto d = sample_dataset(m1, 500, RngSeed{3});
  const auto fit = erm_stumps(d, StumpGrid::from_data(d));
  const auto q = ranking_loss_kernel(bayes_rule(m1));
  const double sigma = std::sqrt(conditional_variance(q, m1));
  CHECK(fit.risk <= bayes_risk(m1) + 3.0 * 2.0 * sigma / std::sqrt(500.0));
  CHECK(fit.risk >= bayes_risk(m1) - 3.0 * 2.0 * sigma / std::sqrt(500.0) - 0.02);
}

TEST_CASE("empirical cost examples") {
  const auto d = line_data({0, 1, 2}, {1, -1, 1});
  const PairScorer zero(ScoringFunction::constant(0.0));
  for (const auto& phi : {CostFunction::exponential(), CostFunction::logit(), CostFunction::hinge()}) {
    CHECK(empirical_cost(zero, d, phi) == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto sep = line_data({0, 1}, {-1, 1});
  const PairScorer margin(ScoringFunction(LinearScorer{{2.0}}));
  CHECK(empirical_cost(margin, sep, CostFunction::hinge()) == 0.0);
  const double v = 0.7;
  const PairScorer lin(ScoringFunction(LinearScorer{{v}}));
  CHECK(empirical_cost(lin, sep, CostFunction::exponential()) == doctest::Approx(std::exp(-v)).epsilon(1e-14));
}

TEST_CASE("convex risk never beats its infimum") {
  Rng rng(RngSeed{8});
  for (int rep = 0; rep < 20; ++rep) {
    const auto model = fixtures::random_bipartite(rng, 2 + rng.index(5));
    const auto* b = model.bipartite();
    for (const auto& phi : {CostFunction::exponential(), CostFunction::logit(), CostFunction::hinge()}) {
      const double best = optimal_convex_risk(model, phi);
      for (int k = 0; k < 5; ++k) {
        std::vector<double> sc;
        for (std::size_t a = 0; a < b->marginal.points.size(); ++a) sc.push_back(4.0 * rng.uniform() - 2.0);
        CHECK(convex_risk(ScoringFunction::table(b->marginal.points, sc), model, phi) >= best - 1e-9);
      }
    }
  }
}

TEST_CASE("boosting decreases the empirical cost") {
  const auto d = sample_dataset(model_m1(), 200, RngSeed{12});
  BoostConfig cfg;
  cfg.rounds = 1;
  cfg.base = StumpGrid::from_data(d);
  const auto one = boost_rank(d, cfg, CostFunction::exponential());
  CHECK(one.initial_objective == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(one.log.size() == 1);
  CHECK(one.final_objective() < 1.0);
  CHECK(empirical_cost(PairScorer(one.scorer), d, CostFunction::exponential()) ==
        doctest::Approx(one.final_objective()).epsilon(1e-10));

  cfg.rounds = 30;
  for (const auto& phi : {CostFunction::exponential(), CostFunction::logit(), CostFunction::hinge()}) {
    const auto r = boost_rank(d, cfg, phi);
    double prev = r.initial_objective;
    for (const auto& round : r.log) {
      CHECK(round.objective <= prev);
      prev = round.objective;
    }
  }
}

TEST_CASE("boosting stops without a descent direction") {
  const auto flat = line_data({0, 1, 2, 3}, {1, 1, 1, 1});
  BoostConfig cfg;
  cfg.base = StumpGrid::from_data(flat);
  const auto r = boost_rank(flat, cfg, CostFunction::exponential());
  CHECK(r.stopped_early);
  CHECK(r.log.empty());
  CHECK(r.final_objective() == 1.0);

  // the stump at 1.5 orders one cross pair correctly and one wrongly
  const auto sym = line_data({0, 1, 2, 3}, {0, 1, 1, 0});
  BoostConfig c2;
  c2.base = StumpGrid{{{1.5}}};
  c2.rounds = 5;
  const auto s = boost_rank(sym, c2, CostFunction::exponential());
  CHECK(s.stopped_early);
  CHECK(s.log.empty());
}

TEST_CASE("boosting respects the weight budget") {
  const auto d = sample_dataset(model_m1(), 150, RngSeed{31});
  for (auto policy : {BudgetPolicy::Clip, BudgetPolicy::Stop, BudgetPolicy::Rescale}) {
    for (auto step : {StepRule::LineSearch, StepRule::Fixed}) {
      BoostConfig cfg;
      cfg.rounds = 25;
      cfg.base = StumpGrid::from_data(d);
      cfg.budget = 0.8;
      cfg.policy = policy;
      cfg.step = step;
      const auto r = boost_rank(d, cfg, CostFunction::exponential());
      CHECK(r.l1_norm() <= 0.8 + 1e-9);
      double prev = r.initial_objective;
      for (const auto& round : r.log) {
        CHECK(round.l1_norm <= 0.8 + 1e-9);
        CHECK(round.objective <= prev);
        prev = round.objective;
      }
    }
  }
  BoostConfig bad;
  bad.base = StumpGrid::from_data(d);
  bad.budget = 0.0;
  CHECK_THROWS_AS(boost_rank(d, bad, CostFunction::exponential()), InvalidArgument);
}

TEST_CASE("boosted ensemble ranks M1 at least as well as the best stump") {
  const auto m1 = model_m1();
  const auto d = sample_dataset(m1, 500, RngSeed{77});
  BoostConfig cfg;
  cfg.rounds = 20;
  cfg.base = StumpGrid::from_data(d);
  const auto r = boost_rank(d, cfg, CostFunction::exponential());
  const auto fit = erm_stumps(d, cfg.base);
  CHECK(true_auc(m1, r.scorer) >= true_auc(m1, ScoringFunction(fit.stump)) - 1e-12);
}

TEST_CASE("kernel ranking: tiny radius keeps the cost near one") {
  const auto d = sample_dataset(model_m1(), 20, RngSeed{4});
  KernelConfig cfg;
  cfg.radius = 1e-6;
  cfg.steps = 20;
  const auto r = kernel_rank(d, cfg, CostFunction::hinge());
  CHECK(r.final_objective == doctest::Approx(1.0).epsilon(1e-5));
  for (double v : r.norm_sq) CHECK(v <= cfg.radius * cfg.radius * (1.0 + 1e-9));
}

TEST_CASE("kernel ranking separates separable data") {
  const auto d = line_data({0, 1, 2, 3, 4, 5}, {-1, -1, -1, 1, 1, 1});
  KernelConfig cfg;
  cfg.radius = 50.0;
  cfg.steps = 300;
  const auto r = kernel_rank(d, cfg, CostFunction::hinge());
  CHECK(empirical_risk(RankingRule(FromPairScorer{PairScorer(r.f)}), d) == 0.0);
  for (double v : r.norm_sq) CHECK(v <= 2500.0 * (1.0 + 1e-9));
  CHECK(r.f.rkhs_norm() <= 50.0 * (1.0 + 1e-9));
}

TEST_CASE("gaussian Gram matrices are positive semidefinite") {
  Rng rng(RngSeed{9});
  const FeatureKernel k(GaussianKernel{0.7});
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t m = 5 + rng.index(20);
    std::vector<Point> w(m, Point(4));
    for (auto& p : w) {
      for (auto& v : p) v = rng.normal();
    }
    Eigen::MatrixXd g(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) g(i, j) = k(w[i], w[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("one kernel step matches the closed form at n = 2") {
  const auto d = line_data({0, 1}, {1, -1});
  KernelConfig cfg;
  cfg.radius = 100.0;
  cfg.steps = 1;
  cfg.step0 = 1.0;
  const auto r = kernel_rank(d, cfg, CostFunction::hinge());
  CHECK(r.bandwidth == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const double k = std::exp(-0.5);
  REQUIRE(r.f.coef.size() == 2);
  CHECK(r.f.coef[0] == doctest::Approx((1.0 - k) / 2.0).epsilon(1e-14));
  CHECK(r.f.coef[1] == doctest::Approx(-(1.0 - k) / 2.0).epsilon(1e-14));
  CHECK(r.final_objective == doctest::Approx(1.0 - (1.0 - k) * (1.0 - k) / 2.0).epsilon(1e-14));
  CHECK(r.norm_sq[0] == doctest::Approx(std::pow(1.0 - k, 3) / 2.0).epsilon(1e-14));
}

TEST_CASE("kernel ranking input checks") {
  const auto d = line_data({0, 1, 2}, {1, -1, 1});
  KernelConfig cfg;
  cfg.radius = 0.0;
  CHECK_THROWS_AS(kernel_rank(d, cfg), InvalidArgument);
  cfg.radius = 1.0;
  cfg.max_anchors = 2;
  CHECK_THROWS_AS(kernel_rank(d, cfg), InvalidArgument);
  const std::vector<Point> same = {{1.0}, {1.0}};
  CHECK(median_distance(same) == 1.0);
}

}  // TEST_SUITE
