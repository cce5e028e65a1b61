#include "urank/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/parallel.hpp"

namespace urank {
namespace {

std::vector<std::vector<double>> block_losses(std::span<const RankingRule> rules, const Dataset& data) {
  if (rules.empty()) throw InvalidArgument("rademacher: empty rule class");
  data.require_pairs("rademacher");
  const std::size_t m = data.size() / 2;
  std::vector<std::vector<double>> losses(m, std::vector<double>(rules.size()));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = data[i];
    const auto& b = data[m + i];
    const int z = label_order(a.y, b.y);
    for (std::size_t k = 0; k < rules.size(); ++k) losses[i][k] = z != 0 && z * rules[k](a.x, b.x) < 0 ? 1.0 : 0.0;
  }
  return losses;
}

double sup_average(const std::vector<std::vector<double>>& losses, const std::vector<int>& eps) {
  const std::size_t m = losses.size();
  const std::size_t k = losses.front().size();
  double best = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += eps[i] * losses[i][c];
    best = std::max(best, std::abs(s));
  }
  return best / static_cast<double>(m);
}

void check_table(const std::vector<std::vector<double>>& losses) {
  if (losses.empty() || losses.front().empty()) throw InvalidArgument("rademacher: empty loss table");
  for (const auto& row : losses) {
    if (row.size() != losses.front().size()) throw InvalidArgument("rademacher: ragged loss table");
  }
}

void require_delta(double delta, const char* op) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument(std::string(op) + ": delta must lie in (0, 1)");
}

std::vector<double> tail_frequencies(const std::vector<double>& stats, const std::vector<double>& t, double offset) {
  std::vector<double> out;
  out.reserve(t.size());
  for (double tv : t) {
    std::size_t hits = 0;
    for (double s : stats) {
      if (s > offset + tv) ++hits;
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(stats.size()));
  }
  return out;
}

double mean_of(const std::vector<double>& v) { return compensated_total(v) / static_cast<double>(v.size()); }

void require_replicates(const TailOptions& o, std::size_t minimum, const char* op) {
  if (o.replicates < minimum) {
    throw InvalidArgument(std::string(op) + ": needs at least " + std::to_string(minimum) + " replicates");
  }
  if (o.n < 2) throw InvalidArgument(std::string(op) + ": n must be >= 2");
}

}  // namespace

RademacherEstimate rademacher_mc(const std::vector<std::vector<double>>& losses, std::size_t draws, RngSeed seed) {
  check_table(losses);
  if (draws < 1) throw InvalidArgument("rademacher_mc: draws must be >= 1");
  Rng rng(seed);
  std::vector<double> values(draws);
  std::vector<int> eps(losses.size());
  for (std::size_t d = 0; d < draws; ++d) {
    for (auto& e : eps) e = rng.rademacher();
    values[d] = sup_average(losses, eps);
  }
  const auto mv = mean_variance(values);
  return {mv.mean, draws > 1 ? std::sqrt(mv.variance / static_cast<double>(draws)) : 0.0, false, draws};
}

RademacherEstimate rademacher_exact(const std::vector<std::vector<double>>& losses) {
  check_table(losses);
  const std::size_t m = losses.size();
  if (m > 20) throw InvalidArgument("rademacher_exact: m = floor(n/2) must be <= 20");
  const std::size_t patterns = std::size_t{1} << m;
  std::vector<int> eps(m);
  CompensatedSum total;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    for (std::size_t i = 0; i < m; ++i) eps[i] = (mask >> i) & 1U ? 1 : -1;
    total.add(sup_average(losses, eps));
  }
  return {total.value() / static_cast<double>(patterns), 0.0, true, patterns};
}

RademacherEstimate rademacher_mc(std::span<const RankingRule> rules, const Dataset& data, std::size_t draws,
                                 RngSeed seed) {
  return rademacher_mc(block_losses(rules, data), draws, seed);
}

RademacherEstimate rademacher_exact(std::span<const RankingRule> rules, const Dataset& data) {
  return rademacher_exact(block_losses(rules, data));
}

// ---------------------------------------------------------------------------

double first_order_bound(double er_n, std::size_t n, double delta) {
  require_delta(delta, "first_order_bound");
  if (n < 2) throw InvalidArgument("first_order_bound: n must be >= 2");
  return 4.0 * er_n + 4.0 * std::sqrt(std::log(1.0 / delta) / static_cast<double>(n - 1));
}

double vc_rademacher_bound(double vc_dim, std::size_t n, double c) {
  if (!(vc_dim >= 1.0) || n < 1 || !(c > 0.0)) {
    throw InvalidArgument("vc_rademacher_bound: needs V >= 1, n >= 1, c > 0");
  }
  return c * std::sqrt(vc_dim / static_cast<double>(n));
}

double fast_rate_bound(double vc_dim, std::size_t n, double delta, double alpha, double c) {
  require_delta(delta, "fast_rate_bound");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("fast_rate_bound: alpha must lie in [0, 1]");
  if (n < 2) throw InvalidArgument("fast_rate_bound: n must be >= 2");
  if (!(vc_dim >= 1.0) || !(c > 0.0)) throw InvalidArgument("fast_rate_bound: needs V >= 1 and C > 0");
  const double nn = static_cast<double>(n);
  return c * std::pow(vc_dim * std::log(nn / delta) / nn, 1.0 / (2.0 - alpha));
}

TailBounds tail_bounds(std::size_t n, double t, double sigma2, double s2, double c) {
  if (!(t > 0.0)) throw InvalidArgument("tail_bounds: t must be > 0");
  if (!(sigma2 >= 0.0) || !(s2 >= 0.0)) throw InvalidArgument("tail_bounds: variances must be >= 0");
  if (!(c > 0.0)) throw InvalidArgument("tail_bounds: constant must be > 0");
  const double half = static_cast<double>(n / 2);
  const double nn = static_cast<double>(n);
  TailBounds b;
  b.hoeffding = 2.0 * std::exp(-2.0 * half * t * t);
  b.bernstein = 2.0 * std::exp(-half * t * t / (2.0 * sigma2 + 2.0 * t / 3.0));
  b.dpg = 4.0 * std::exp(-nn * t * t / (8.0 * s2 + c * t));
  return b;
}

double kernel_class_rademacher(double radius, std::span<const double> diagonal, std::size_t n) {
  if (n < 1) throw InvalidArgument("kernel_class_rademacher: n must be >= 1");
  if (!(radius >= 0.0)) throw InvalidArgument("kernel_class_rademacher: radius must be >= 0");
  CompensatedSum s;
  for (double d : diagonal) {
    if (!(d >= 0.0)) throw InvalidArgument("kernel_class_rademacher: negative diagonal kernel value");
    s.add(d);
  }
  return 2.0 * radius / static_cast<double>(n) * std::sqrt(s.value());
}

double convex_estimation_bound(double radius, const CostFunction& phi, double rademacher, std::size_t n,
                               double delta) {
  require_delta(delta, "convex_estimation_bound");
  if (n < 1 || !(radius > 0.0)) throw InvalidArgument("convex_estimation_bound: needs n >= 1 and B > 0");
  return 8.0 * radius * phi.derivative(radius) * rademacher +
         std::sqrt(2.0 * radius * radius * std::log(1.0 / delta) / static_cast<double>(n));
}

// ---------------------------------------------------------------------------

TailReport ustat_tail_harness(const PairKernel& q, const SyntheticModel& model, const TailOptions& options) {
  require_replicates(options, 1, "ustat_tail_harness");
  TailReport rep;
  rep.n = options.n;
  rep.replicates = options.replicates;
  rep.c = options.c;
  rep.t = options.t;
  if (rep.t.empty()) {
    for (int k = 1; k <= 15; ++k) rep.t.push_back(0.02 * k);
  }
  std::sort(rep.t.begin(), rep.t.end());

  rep.mean = kernel_mean(q, model);
  const auto outcomes = enumerate_outcomes(model);
  CompensatedSum sq;
  for (const auto& a : outcomes) {
    for (const auto& b : outcomes) {
      const double v = q(a.sample, b.sample) - rep.mean;
      sq.add(a.prob * b.prob * v * v);
    }
  }
  rep.sigma2 = std::max(0.0, sq.value());
  rep.s2 = conditional_variance(q, model);

  std::vector<double> dev(options.replicates);
  parallel_for(options.replicates, options.jobs, [&](std::size_t r) {
    const Dataset d = sample_dataset(model, options.n, replicate_seed(options.seed, r));
    dev[r] = std::abs(u_stat(q, d) - rep.mean);
  });
  rep.empirical = tail_frequencies(dev, rep.t, 0.0);
  for (double t : rep.t) {
    const auto b = tail_bounds(options.n, t, rep.sigma2, rep.s2, options.c);
    rep.bound_hoeffding.push_back(b.hoeffding);
    rep.bound_bernstein.push_back(b.bernstein);
    rep.bound_dpg.push_back(b.dpg);
  }
  return rep;
}

double moment_bound(double t, double c, double e_u, double e_m, double f_sup, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  const double a = e_u > 0.0 ? (t / e_u) * (t / e_u) : inf;
  const double b = e_m + f_sup * nn > 0.0 ? t / (e_m + f_sup * nn) : inf;
  const double d = f_sup > 0.0 ? std::pow(t / (f_sup * std::sqrt(nn)), 2.0 / 3.0) : inf;
  const double e = f_sup > 0.0 ? std::sqrt(t / f_sup) : inf;
  return std::exp(-std::min({a, b, d, e}) / c);
}

TailReport moment_tail_harness(std::span<const PairKernel> kernels, const SyntheticModel& model,
                               const TailOptions& options) {
  if (kernels.empty()) throw InvalidArgument("moment_tail_harness: empty kernel class");
  require_replicates(options, 100, "moment_tail_harness");
  if (!(options.c > 0.0)) throw InvalidArgument("moment_tail_harness: C must be > 0");
  for (const auto& f : kernels) {
    if (degeneracy_check(f, model) >= 1e-10) {
      throw InvalidArgument("moment_tail_harness: kernel '" + f.name + "' is not degenerate under the model");
    }
  }
  TailReport rep;
  rep.n = options.n;
  rep.replicates = options.replicates;
  rep.c = options.c;

  const auto outcomes = enumerate_outcomes(model);
  for (const auto& f : kernels) {
    for (const auto& a : outcomes) {
      for (const auto& b : outcomes) rep.f_sup = std::max(rep.f_sup, std::abs(f(a.sample, b.sample)));
    }
  }

  std::vector<double> z(options.replicates);
  std::vector<double> z_eps(options.replicates);
  std::vector<double> u_eps(options.replicates);
  std::vector<double> m_stat(options.replicates);
  parallel_for(options.replicates, options.jobs, [&](std::size_t r) {
    Rng rng(replicate_seed(options.seed, r));
    const Dataset d = sample_dataset(model, options.n, rng);
    std::vector<int> eps(options.n);
    for (auto& e : eps) e = rng.rademacher();
    z[r] = chaos_sup(kernels, d);
    const auto cs = chaos_statistics(kernels, d, std::move(eps));
    z_eps[r] = cs.z_eps;
    u_eps[r] = cs.u_eps;
    m_stat[r] = cs.m_stat;
  });
  rep.e_z_eps = mean_of(z_eps);
  rep.e_u_eps = mean_of(u_eps);
  rep.e_m = mean_of(m_stat);

  rep.t = options.t;
  if (rep.t.empty()) {
    const double scale = rep.f_sup * static_cast<double>(options.n) * static_cast<double>(options.n - 1);
    for (int k = 1; k <= 20; ++k) rep.t.push_back(scale * k / 20.0);
  }
  std::sort(rep.t.begin(), rep.t.end());
  rep.empirical = tail_frequencies(z, rep.t, options.c * rep.e_z_eps);
  for (double t : rep.t) {
    rep.bound_moment.push_back(moment_bound(t, options.c, rep.e_u_eps, rep.e_m, rep.f_sup, options.n));
  }
  return rep;
}

}  // namespace urank
