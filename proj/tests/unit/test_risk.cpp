#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/risk.hpp"
#include "urank/ustat.hpp"

using namespace urank;

namespace {

// L(r) by enumerating pairs of outcomes (discrete labels only).
double oracle_risk(const RankingRule& r, const SyntheticModel& model) {
  const auto outcomes = enumerate_outcomes(model);
  double s = 0.0;
  for (const auto& a : outcomes) {
    for (const auto& b : outcomes) {
      if ((a.sample.y - b.sample.y) * r(a.sample.x, b.sample.x) < 0) s += a.prob * b.prob;
    }
  }
  return s;
}

// Var h_s by enumeration of the excess-loss kernel.
double oracle_h_variance(const ScoringFunction& s, const SyntheticModel& model) {
  const auto q = excess_loss_kernel(RankingRule::from_scorer(s), model);
  const auto outcomes = enumerate_outcomes(model);
  std::vector<double> h;
  double mean = 0.0;
  for (const auto& a : outcomes) {
    double v = 0.0;
    for (const auto& b : outcomes) v += b.prob * 0.5 * (q(a.sample, b.sample) + q(b.sample, a.sample));
    h.push_back(v);
    mean += a.prob * v;
  }
  double var = 0.0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) var += outcomes[k].prob * (h[k] - mean) * (h[k] - mean);
  return var;
}

ScoringFunction m1_table(double s0, double s1, double s2) {
  return ScoringFunction::table({{0.0}, {1.0}, {2.0}}, {s0, s1, s2});
}

}  // namespace

TEST_SUITE("risk") {

TEST_CASE("empirical risk examples") {
  const std::vector<double> scores = {0.9, 0.8, 0.7, 0.6};
  const std::vector<double> labels = {1, -1, 1, -1};
  CHECK(empirical_risk(scores, labels) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const std::vector<double> same = {1, 1, 1, 1};
  CHECK(empirical_risk(scores, same) == 0.0);
  const std::vector<double> sep = {1, 1, -1, -1};
  CHECK(empirical_risk(scores, sep) == 0.0);

  Dataset d({{{0.9}, 1}, {{0.8}, -1}, {{0.7}, 1}, {{0.6}, -1}});
  CHECK(empirical_risk(RankingRule::from_scorer(LinearScorer{{1.0}}), d) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("empirical risk equals a direct pair count") {
  Rng rng(RngSeed{12});
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng.index(50);
    const auto scores = fixtures::random_vector(rng, n, 4);
    const auto labels = fixtures::random_vector(rng, n, 3);
    double bad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const int r = scores[i] >= scores[j] ? 1 : -1;
        if (i != j && (labels[i] - labels[j]) * r < 0) bad += 1.0;
      }
    }
    CHECK(empirical_risk(scores, labels) == doctest::Approx(bad / (n * (n - 1.0))).epsilon(1e-15));
  }
}

TEST_CASE("true risk on M1") {
  const auto m1 = model_m1();
  CHECK(std::abs(true_risk(bayes_rule(m1), m1) - 0.0975) < 1e-15);
  // r = +1 everywhere errs exactly when Y = -1, Y' = +1.
  const double constant = true_risk(RankingRule::from_scorer(ScoringFunction::constant()), m1);
  CHECK(std::abs(constant - 0.55 * 0.45) < 1e-15);
  const SyntheticModel one(DiscreteBipartite{{{{0.0}}, {1.0}}, {0.3}});
  // a single atom ties every pair, so the rule is +1 and errs when Y < Y'
  CHECK(true_risk(RankingRule::from_scorer(LinearScorer{{1.0}}), one) == doctest::Approx(0.21).epsilon(1e-15));
}

TEST_CASE("true risk equals the outcome enumeration on random models") {
  Rng rng(RngSeed{31});
  for (int rep = 0; rep < 25; ++rep) {
    const auto model = rep % 2 == 0 ? fixtures::random_bipartite(rng, 1 + rng.index(7), 1 + rng.index(2))
                                    : fixtures::random_noiseless(rng, 1 + rng.index(7));
    std::vector<Point> pts;
    std::vector<double> sc;
    for (const auto& a : enumerate_support(model)) {
      if (std::find(pts.begin(), pts.end(), a.x) != pts.end()) continue;
      pts.push_back(a.x);
      sc.push_back(static_cast<double>(rng.index(3)));
    }
    const auto rule = RankingRule::from_scorer(ScoringFunction::table(pts, sc));
    CHECK(std::abs(true_risk(rule, model) - oracle_risk(rule, model)) < 1e-14);
    const PairLaw law(model);
    CHECK(std::abs(law.bayes_risk() - oracle_risk(bayes_rule(model), model)) < 1e-14);
  }
}

TEST_CASE("Monte Carlo risk agrees with enumeration") {
  const auto m1 = model_m1();
  const auto rule = RankingRule::from_scorer(ScoringFunction(Stump{0, 1.0, 1}));
  const auto mc = true_risk_mc(rule, m1, 200000, RngSeed{3});
  CHECK(std::abs(mc.value - true_risk(rule, m1)) < 4.0 * mc.std_error);

  const SyntheticModel noisy(NoisyRegression{FiniteMarginal{{{0.0}, {1.0}, {2.0}}, {0.3, 0.3, 0.4}},
                                             LinearFn{{0.5}, 0.0}, LinearFn{{0.2}, 0.3}});
  const auto mcn = true_risk_mc(rule, noisy, 200000, RngSeed{4});
  CHECK(std::abs(mcn.value - true_risk(rule, noisy)) < 4.0 * mcn.std_error);
  const auto bayes_mc = true_risk_mc(bayes_rule(noisy), noisy, 200000, RngSeed{5});
  CHECK(std::abs(bayes_mc.value - bayes_risk(noisy)) < 4.0 * bayes_mc.std_error);

  const SyntheticModel box(NoiselessRegression{UniformBox{{0.0}, {1.0}}, LinearFn{{1.0}, 0.0}});
  CHECK_THROWS_AS(true_risk(rule, box), UnsupportedModel);
}

TEST_CASE("Bayes rule orderings") {
  const auto m1 = model_m1();
  const auto r = bayes_rule(m1);
  CHECK(r(Point{2.0}, Point{1.0}) == 1);
  CHECK(r(Point{1.0}, Point{0.0}) == 1);
  CHECK(r(Point{0.0}, Point{2.0}) == -1);
  const SyntheticModel reg(NoiselessRegression{uniform_grid(0.0, 1.0, 8), LinearFn{{1.0}, 0.0}});
  const auto rr = bayes_rule(reg);
  CHECK(rr(Point{0.3}, Point{0.2}) == 1);
  CHECK(rr(Point{0.2}, Point{0.3}) == -1);

  const SyntheticModel flat(DiscreteBipartite{{{{0.0}, {1.0}}, {0.4, 0.6}}, {0.3, 0.3}});
  const auto rf = bayes_rule(flat);
  CHECK(rf(Point{0.0}, Point{1.0}) == 1);
  CHECK(rf(Point{1.0}, Point{0.0}) == 1);
  CHECK(true_risk(rf, flat) == doctest::Approx(0.3 * 0.7).epsilon(1e-14));
}

TEST_CASE("Bayes risk forms") {
  const auto f = bayes_risk_forms(model_m1());
  CHECK(std::abs(f.min_form - 0.0975) < 1e-12);
  CHECK(std::abs(f.gini_form - 0.0975) < 1e-12);
  CHECK(std::abs(f.enumeration - 0.0975) < 1e-12);
  CHECK(std::abs(bayes_risk(model_m1()) - 0.0975) < 1e-12);

  const SyntheticModel half(DiscreteBipartite{{{{0.0}, {1.0}}, {0.5, 0.5}}, {0.5, 0.5}});
  CHECK(bayes_risk(half) == doctest::Approx(0.25).epsilon(1e-15));
  const SyntheticModel reg(NoiselessRegression{UniformBox{{0.0}, {1.0}}, LinearFn{{1.0}, 0.0}});
  CHECK(bayes_risk(reg) == 0.0);
  CHECK_THROWS_AS(bayes_risk_forms(reg), UnsupportedModel);

  Rng rng(RngSeed{2});
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = fixtures::random_bipartite(rng, 1 + rng.index(8));
    const auto g = bayes_risk_forms(m);
    CHECK(std::abs(g.min_form - g.gini_form) < 1e-12);
    CHECK(std::abs(g.min_form - g.enumeration) < 1e-12);
  }
}

TEST_CASE("excess risk") {
  const auto m1 = model_m1();
  CHECK(excess_risk(m1_table(0.2, 0.5, 0.9), m1) == 0.0);
  const auto swapped = m1_table(0.2, 0.9, 0.5);
  const double oracle = oracle_risk(RankingRule::from_scorer(swapped), m1) - 0.0975;
  CHECK(std::abs(excess_risk(swapped, m1) - oracle) < 1e-15);
  // disagreement on (1,2) and (2,1): 2 * 0.25 * 0.25 * |0.9 * 0.5 - 0.5 * 0.1|
  CHECK(std::abs(excess_risk(swapped, m1) - 2.0 * 0.0625 * 0.4) < 1e-15);
  CHECK(std::abs(excess_risk(ScoringFunction::constant(), m1) - (0.2475 - 0.0975)) < 1e-15);
}

TEST_CASE("stump excess table matches direct excess") {
  Rng rng(RngSeed{17});
  for (int rep = 0; rep < 30; ++rep) {
    SyntheticModel model = rep % 3 == 0   ? fixtures::random_noiseless(rng, 1 + rng.index(8))
                           : rep % 3 == 1 ? fixtures::random_bipartite(rng, 1 + rng.index(8), 1 + rng.index(3))
                                          : SyntheticModel(NoisyRegression{
                                                FiniteMarginal{{{0.0}, {1.0}, {2.0}, {3.0}}, {0.1, 0.2, 0.3, 0.4}},
                                                TableFn{{{0.0}, {1.0}, {2.0}, {3.0}},
                                                        {rng.uniform(), rng.uniform(), 0.5, rng.uniform()}},
                                                ConstantFn{0.3 + rng.uniform()}});
    const PairLaw law(model);
    const StumpExcessTable table(law);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < model.dim(); ++d) {
      for (double t = -0.5; t <= 9.0; t += 0.25) {
        for (int dir : {1, -1}) {
          const Stump s{d, t, dir};
          const double direct = excess_risk(ScoringFunction(s), model);
          CHECK(std::abs(table.excess(s) - direct) < 1e-13);
          best = std::min(best, direct);
        }
      }
    }
    CAPTURE(rep);
    CAPTURE(table.min_excess());
    CAPTURE(best);
    CHECK(std::abs(table.min_excess() - best) < 1e-13);
  }
}

TEST_CASE("h variance") {
  const auto m1 = model_m1();
  CHECK(h_variance(m1_table(0.2, 0.5, 0.9), m1) < 1e-30);
  const auto reversed = m1_table(0.9, 0.5, 0.2);
  const double v = h_variance(reversed, m1);
  CHECK(v > 0.0);
  CHECK(std::abs(v - oracle_h_variance(reversed, m1)) < 1e-15);

  // Under the atom-excluding noise constant: Var h <= c Lambda^alpha.
  const double lambda = excess_risk(reversed, m1);
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto c = noise_constant(m1, alpha);
    CHECK(v <= c.value * std::pow(lambda, alpha) + 1e-15);
  }

  Rng rng(RngSeed{8});
  for (int rep = 0; rep < 20; ++rep) {
    const auto model = fixtures::random_noiseless(rng, 2 + rng.index(6));
    std::vector<Point> pts;
    std::vector<double> sc;
    for (const auto& a : enumerate_support(model)) {
      pts.push_back(a.x);
      sc.push_back(rng.uniform());
    }
    const auto s = ScoringFunction::table(pts, sc);
    const double hv = h_variance(s, model);
    CHECK(std::abs(hv - oracle_h_variance(s, model)) < 1e-14);
    CHECK(hv <= excess_risk(s, model) + 1e-15);
  }
}

TEST_CASE("noisy regression variance bound with the strict noise constant") {
  Rng rng(RngSeed{23});
  double worst = -1.0;
  double excluded_worst = -1.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t k = 2 + rng.index(5);
    FiniteMarginal marg;
    TableFn m;
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      marg.points.push_back({static_cast<double>(a)});
      marg.probs.push_back(0.1 + rng.uniform());
      total += marg.probs.back();
      m.points.push_back({static_cast<double>(a)});
      m.values.push_back(static_cast<double>(a) + 0.5 * rng.uniform());
    }
    for (auto& p : marg.probs) p /= total;
    const SyntheticModel model(NoisyRegression{marg, m, ConstantFn{0.2 + rng.uniform()}});
    std::vector<double> sc(k);
    for (auto& v : sc) v = rng.uniform();
    const auto s = ScoringFunction::table(marg.points, sc);
    const double hv = h_variance(s, model);
    const double lambda = excess_risk(s, model);
    for (double alpha : {0.25, 0.5, 1.0}) {
      const auto c = noise_constant(model, alpha);
      // every atom collides with itself, so only the strict constant is valid
      CHECK(c.atom_collision);
      worst = std::max(worst, hv - (2.0 * normal_cdf(c.strict_value) - 1.0) * std::pow(lambda, alpha));
      excluded_worst = std::max(excluded_worst, hv - (2.0 * normal_cdf(c.value) - 1.0) * std::pow(lambda, alpha));
    }
  }
  CHECK(worst <= 1e-12);
  // the atom-excluding constant is not enough here
  CHECK(excluded_worst > 0.0);
}

TEST_CASE("h variance of a nearly noiseless gaussian model approaches the noiseless value") {
  const FiniteMarginal marg{{{0.0}, {1.0}, {2.0}, {3.0}}, {0.1, 0.2, 0.3, 0.4}};
  const TableFn m{{{0.0}, {1.0}, {2.0}, {3.0}}, {0.0, 2.0, 1.0, 3.0}};
  const SyntheticModel noiseless(NoiselessRegression{marg, m});
  const SyntheticModel noisy(NoisyRegression{marg, m, ConstantFn{1e-3}});
  const auto s = ScoringFunction::table(marg.points, {0.0, 1.0, 2.0, 3.0});
  CHECK(std::abs(h_variance(s, noisy) - h_variance(s, noiseless)) < 1e-9);
  CHECK(std::abs(excess_risk(s, noisy) - excess_risk(s, noiseless)) < 1e-9);
}

TEST_CASE("noise constant") {
  const auto m1 = model_m1();
  const auto zero = noise_constant(m1, 0.0);
  CHECK(zero.value == 1.0);
  CHECK(zero.strict_value == 1.0);

  const auto half = noise_constant(m1, 0.5);
  const std::vector<double> eta = {0.2, 0.5, 0.9};
  const std::vector<double> p = {0.5, 0.25, 0.25};
  double expected = 0.0;
  for (std::size_t x = 0; x < 3; ++x) {
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k != x) s += p[k] / std::sqrt(std::abs(eta[x] - eta[k]));
    }
    expected = std::max(expected, s);
  }
  CHECK(std::abs(half.value - expected) < 1e-13);
  CHECK(half.atom_collision);
  CHECK(std::isinf(half.strict_value));
  CHECK(half.collision_mass == 0.5);
  CHECK_THROWS_AS(noise_constant(m1, 1.5), InvalidArgument);

  // eta(X) uniform on the 512 cell midpoints of [0.1, 0.9]: density 1.25 per unit of eta
  DiscreteBipartite grid;
  const auto cells = uniform_grid(0.1, 0.9, 512);
  for (std::size_t k = 0; k < 512; ++k) {
    grid.marginal.points.push_back({static_cast<double>(k)});
    grid.eta.push_back(cells.points[k][0]);
  }
  grid.marginal.probs = cells.probs;
  const auto nc = noise_constant(SyntheticModel(grid), 0.8);
  CHECK(nc.value <= 12.5);
  CHECK(nc.value > 1.0);
}

TEST_CASE("Gini mean difference and Delta") {
  CHECK(std::abs(gini_mean_difference(model_m1()) - 0.3) < 1e-15);
  const SyntheticModel flat(DiscreteBipartite{{{{0.0}, {1.0}}, {0.4, 0.6}}, {0.3, 0.3}});
  CHECK(gini_mean_difference(flat) == 0.0);
  // eta in {0, 1} with P(eta = 1) = p: E|eta - eta'| = 2 p (1 - p)
  const double p = 0.3;
  const SyntheticModel two(DiscreteBipartite{{{{0.0}, {1.0}}, {1.0 - p, p}}, {0.0, 1.0}});
  CHECK(std::abs(gini_mean_difference(two) - 2.0 * p * (1.0 - p)) < 1e-15);

  const NoisyRegression nr{FiniteMarginal{{{1.0}, {3.0}}, {0.5, 0.5}}, LinearFn{{1.0}, 0.0}, ConstantFn{1.0}};
  const Point a{1.0};
  const Point b{3.0};
  CHECK(std::abs(delta(nr, a, b) + std::sqrt(2.0)) < 1e-15);
  CHECK(delta(nr, a, a) == 0.0);
  const NoisyRegression scaled{nr.marginal, nr.m, ConstantFn{4.0}};
  CHECK(std::abs(delta(scaled, a, b) - delta(nr, a, b) / 4.0) < 1e-15);
}

}  // TEST_SUITE
