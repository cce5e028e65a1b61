#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "urank/bounds.hpp"
#include "urank/errors.hpp"
#include "urank/risk.hpp"

using namespace urank;

namespace {

// E sup_k (1/m) |sum_i eps_i L[i][k]| by recursion over the sign choices.
double rademacher_oracle(const std::vector<std::vector<double>>& losses) {
  const std::size_t m = losses.size();
  const std::size_t k = losses[0].size();
  double total = 0.0;
  std::vector<double> partial(k, 0.0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == m) {
      double best = 0.0;
      for (double v : partial) best = std::max(best, std::abs(v));
      total += best / static_cast<double>(m);
      return;
    }
    for (int e : {-1, 1}) {
      for (std::size_t c = 0; c < k; ++c) partial[c] += e * losses[i][c];
      self(self, i + 1);
      for (std::size_t c = 0; c < k; ++c) partial[c] -= e * losses[i][c];
    }
  };
  rec(rec, 0);
  return total / std::pow(2.0, static_cast<double>(m));
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("rademacher average of a constant class") {
  const std::vector<std::vector<double>> two = {{1.0}, {1.0}};
  CHECK(rademacher_exact(two).value == 0.5);
  for (int m = 1; m <= 12; ++m) {
    // E |S_m| / m for a simple random walk
    double e = 0.0;
    for (int k = 0; k <= m; ++k) e += binomial(m, k) * std::abs(2 * k - m);
    e /= std::pow(2.0, m) * m;
    const std::vector<std::vector<double>> ones(static_cast<std::size_t>(m), std::vector<double>{1.0});
    CHECK(rademacher_exact(ones).value == doctest::Approx(e).epsilon(1e-14));
  }
  const std::vector<std::vector<double>> zeros(5, std::vector<double>(3, 0.0));
  CHECK(rademacher_exact(zeros).value == 0.0);
  CHECK(rademacher_mc(zeros, 50, RngSeed{1}).value == 0.0);
  CHECK_THROWS_AS(rademacher_exact(std::vector<std::vector<double>>(21, {1.0})), InvalidArgument);
}

TEST_CASE("rademacher exact matches the oracle and MC agrees") {
  Rng rng(RngSeed{17});
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 1 + rng.index(10);
    const std::size_t k = 1 + rng.index(6);
    std::vector<std::vector<double>> t(m, std::vector<double>(k));
    for (auto& row : t) {
      for (auto& v : row) v = static_cast<double>(rng.index(2));
    }
    CHECK(rademacher_exact(t).value == doctest::Approx(rademacher_oracle(t)).epsilon(1e-13));
  }

  const auto d = sample_dataset(model_m1(), 20, RngSeed{2});
  std::vector<RankingRule> rules;
  for (double th : {0.5, 1.5, 2.5}) {
    for (int dir : {-1, 1}) rules.push_back(RankingRule::from_scorer(ScoringFunction(Stump{0, th, dir})));
  }
  const auto exact = rademacher_exact(rules, d);
  const auto mc = rademacher_mc(rules, d, 4000, RngSeed{3});
  CHECK(exact.exact);
  CHECK(exact.draws == 1024);
  CHECK(std::abs(mc.value - exact.value) <= 3.0 * mc.std_error);
}

TEST_CASE("closed-form bounds") {
  CHECK(first_order_bound(0.1, 2, 0.5) == doctest::Approx(0.4 + 4.0 * std::sqrt(std::log(2.0))).epsilon(1e-15));
  CHECK(first_order_bound(0.05, 1001, 0.05) ==
        doctest::Approx(0.2 + 4.0 * std::sqrt(std::log(20.0) / 1000.0)).epsilon(1e-15));
  CHECK_THROWS_AS(first_order_bound(0.1, 10, 1.0), InvalidArgument);
  CHECK(vc_rademacher_bound(4.0, 100, 2.0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(vc_rademacher_bound(0.5, 100), InvalidArgument);
  const double base = 3.0 * std::log(1000.0 / 0.01) / 1000.0;
  CHECK(fast_rate_bound(3.0, 1000, 0.01, 0.0) == doctest::Approx(std::sqrt(base)).epsilon(1e-14));
  CHECK(fast_rate_bound(3.0, 1000, 0.01, 1.0, 2.0) == doctest::Approx(2.0 * base).epsilon(1e-14));
  // a larger noise exponent gives a faster rate
  CHECK(fast_rate_bound(3.0, 1000, 0.01, 0.5) < fast_rate_bound(3.0, 1000, 0.01, 0.0));
  CHECK_THROWS_AS(fast_rate_bound(3.0, 1000, 0.01, 1.5), InvalidArgument);
}

TEST_CASE("tail bound formulas") {
  const auto b = tail_bounds(101, 0.1, 0.25, 0.0, 1.0);
  CHECK(b.hoeffding == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(b.bernstein == doctest::Approx(2.0 * std::exp(-50.0 * 0.01 / (0.5 + 0.2 / 3.0))).epsilon(1e-15));
  CHECK(b.dpg == doctest::Approx(4.0 * std::exp(-101.0 * 0.1)).epsilon(1e-14));
  CHECK(tail_bounds(10, 1e-9, 0.25, 0.1).bernstein == doctest::Approx(2.0).epsilon(1e-9));
  const auto c = tail_bounds(100, 0.2, 0.1, 0.05, 3.0);
  CHECK(c.dpg == doctest::Approx(4.0 * std::exp(-100.0 * 0.04 / (0.4 + 0.6))).epsilon(1e-15));
  CHECK_THROWS_AS(tail_bounds(10, 0.0, 0.1, 0.1), InvalidArgument);
  CHECK_THROWS_AS(tail_bounds(10, 0.1, -0.1, 0.1), InvalidArgument);
}

TEST_CASE("kernel class rademacher and the convex estimation bound") {
  const std::vector<double> diag = {1.0, 1.0, 1.0, 1.0};
  CHECK(kernel_class_rademacher(2.0, diag, 8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kernel_class_rademacher(0.0, diag, 8) == 0.0);
  const std::vector<double> neg = {1.0, -0.1};
  CHECK_THROWS_AS(kernel_class_rademacher(1.0, neg, 4), InvalidArgument);
  const double v = convex_estimation_bound(1.0, CostFunction::exponential(), 0.1, 100, 0.05);
  CHECK(v == doctest::Approx(8.0 * std::exp(1.0) * 0.1 + std::sqrt(2.0 * std::log(20.0) / 100.0)).epsilon(1e-14));
}

TEST_CASE("u-statistic tail harness") {
  const auto m1 = model_m1();
  const auto q = ranking_loss_kernel(bayes_rule(m1));
  TailOptions o;
  o.n = 20;
  o.replicates = 400;
  const auto rep = ustat_tail_harness(q, m1, o);
  REQUIRE(rep.t.size() == 15);
  CHECK(rep.mean == doctest::Approx(bayes_risk(m1)).epsilon(1e-14));
  CHECK(rep.sigma2 == doctest::Approx(rep.mean * (1.0 - rep.mean)).epsilon(1e-12));
  for (std::size_t k = 1; k < rep.t.size(); ++k) {
    CHECK(rep.empirical[k] <= rep.empirical[k - 1]);
    CHECK(rep.bound_hoeffding[k] <= rep.bound_hoeffding[k - 1]);
  }
  o.replicates = 0;
  CHECK_THROWS_AS(ustat_tail_harness(q, m1, o), InvalidArgument);
}

TEST_CASE("moment harness: zero class and homogeneity") {
  const auto m1 = model_m1();
  TailOptions o;
  o.n = 12;
  o.replicates = 200;
  o.c = 2.0;
  o.t = {0.5, 1.0};
  const std::vector<PairKernel> zero = {constant_kernel(0.0)};
  const auto z = moment_tail_harness(zero, m1, o);
  CHECK(z.f_sup == 0.0);
  CHECK(z.e_z_eps == 0.0);
  for (double v : z.empirical) CHECK(v == 0.0);
  for (double v : z.bound_moment) CHECK(v == 0.0);

  const KernelProjection proj(ranking_loss_kernel(bayes_rule(m1)), m1);
  const std::vector<PairKernel> one = {proj.degenerate_kernel()};
  const std::vector<PairKernel> scaled = {scale_kernel(proj.degenerate_kernel(), 4.0)};
  o.t = {};
  const auto a = moment_tail_harness(one, m1, o);
  const auto b = moment_tail_harness(scaled, m1, o);
  CHECK(b.f_sup == doctest::Approx(4.0 * a.f_sup).epsilon(1e-12));
  CHECK(b.e_z_eps == doctest::Approx(4.0 * a.e_z_eps).epsilon(1e-12));
  CHECK(b.e_u_eps == doctest::Approx(4.0 * a.e_u_eps).epsilon(1e-12));
  REQUIRE(a.t.size() == b.t.size());
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    CHECK(b.t[k] == doctest::Approx(4.0 * a.t[k]).epsilon(1e-12));
    CHECK(b.empirical[k] == a.empirical[k]);
    CHECK(b.bound_moment[k] == doctest::Approx(a.bound_moment[k]).epsilon(1e-10));
  }

  const std::vector<PairKernel> raw = {ranking_loss_kernel(bayes_rule(m1))};
  CHECK_THROWS_AS(moment_tail_harness(raw, m1, o), InvalidArgument);
  o.replicates = 50;
  CHECK_THROWS_AS(moment_tail_harness(one, m1, o), InvalidArgument);
}

TEST_CASE("moment bound") {
  CHECK(moment_bound(1.0, 1.0, 0.0, 0.0, 0.0, 10) == 0.0);
  const double t = 5.0;
  const double expect = std::exp(-std::min({(t / 2.0) * (t / 2.0), t / (1.0 + 10.0), std::pow(t / std::sqrt(10.0), 2.0 / 3.0),
                                            std::sqrt(t)}) / 3.0);
  CHECK(moment_bound(t, 3.0, 2.0, 1.0, 1.0, 10) == doctest::Approx(expect).epsilon(1e-15));
}

}  // TEST_SUITE
