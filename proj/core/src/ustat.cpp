#include "urank/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/risk.hpp"

namespace urank {
namespace {

double symmetrized(const PairKernel& q, const LabeledSample& a, const LabeledSample& b) {
  if (q.symmetric) return q(a, b);
  return 0.5 * (q(a, b) + q(b, a));
}

using SampleKey = std::pair<Point, double>;

void require_kernels(std::span<const PairKernel> kernels) {
  if (kernels.empty()) throw InvalidArgument("chaos_statistics: empty kernel class");
}

// Off-diagonal kernel matrix F[i * n + j] = f(s_i, s_j), diagonal zero.
std::vector<double> kernel_matrix(const PairKernel& f, const Dataset& data) {
  const std::size_t n = data.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) m[i * n + j] = f(data[i], data[j]);
    }
  }
  return m;
}

}  // namespace

PairKernel constant_kernel(double c) {
  return PairKernel{[c](const LabeledSample&, const LabeledSample&) { return c; }, true, c == 0.0,
                    "constant"};
}

PairKernel ranking_loss_kernel(RankingRule r) {
  return PairKernel{[r = std::move(r)](const LabeledSample& a, const LabeledSample& b) {
                      const int z = label_order(a.y, b.y);
                      return z != 0 && z * r(a.x, b.x) < 0 ? 1.0 : 0.0;
                    },
                    false, false, "ranking-loss"};
}

PairKernel excess_loss_kernel(RankingRule r, const SyntheticModel& model) {
  return PairKernel{[r = std::move(r), star = bayes_rule(model)](const LabeledSample& a, const LabeledSample& b) {
                      const int z = label_order(a.y, b.y);
                      if (z == 0) return 0.0;
                      const double mine = z * r(a.x, b.x) < 0 ? 1.0 : 0.0;
                      const double best = z * star(a.x, b.x) < 0 ? 1.0 : 0.0;
                      return mine - best;
                    },
                    false, false, "excess-loss"};
}

PairKernel scale_kernel(PairKernel q, double lambda) {
  auto inner = std::move(q.fn);
  q.fn = [inner = std::move(inner), lambda](const LabeledSample& a, const LabeledSample& b) {
    return lambda * inner(a, b);
  };
  return q;
}

double u_stat(const PairKernel& q, const Dataset& data) {
  data.require_pairs("u_stat");
  const std::size_t n = data.size();
  CompensatedSum s;
  if (q.symmetric) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s.add(2.0 * q(data[i], data[j]));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s.add(q(data[i], data[j]));
      }
    }
  }
  return s.value() / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double split_estimate(const PairKernel& q, const Dataset& data) {
  data.require_pairs("split_estimate");
  const std::size_t m = data.size() / 2;
  CompensatedSum s;
  for (std::size_t i = 0; i < m; ++i) s.add(q(data[i], data[m + i]));
  return s.value() / static_cast<double>(m);
}

// ---------------------------------------------------------------------------

struct KernelProjection::State {
  PairKernel q;
  std::vector<Outcome> outcomes;
  std::vector<double> h;
  std::map<SampleKey, double> lookup;
  double mean = 0.0;

  [[nodiscard]] double raw_h(const LabeledSample& a) const {
    CompensatedSum s;
    for (const auto& o : outcomes) s.add(o.prob * symmetrized(q, a, o.sample));
    return s.value() - mean;
  }
};

KernelProjection::KernelProjection(PairKernel q, const SyntheticModel& model) {
  auto st = std::make_shared<State>();
  st->q = std::move(q);
  st->outcomes = enumerate_outcomes(model);
  const std::size_t k = st->outcomes.size();

  std::vector<double> g(k);
  CompensatedSum total;
  for (std::size_t a = 0; a < k; ++a) {
    CompensatedSum s;
    for (std::size_t b = 0; b < k; ++b) {
      s.add(st->outcomes[b].prob * symmetrized(st->q, st->outcomes[a].sample, st->outcomes[b].sample));
    }
    g[a] = s.value();
    total.add(st->outcomes[a].prob * g[a]);
  }
  st->mean = total.value();
  st->h.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    st->h[a] = g[a] - st->mean;
    const auto& smp = st->outcomes[a].sample;
    st->lookup.emplace(SampleKey{smp.x, smp.y}, st->h[a]);
  }
  mean_ = st->mean;
  state_ = std::move(st);
}

double KernelProjection::h(const LabeledSample& a) const {
  const auto it = state_->lookup.find(SampleKey{a.x, a.y});
  if (it != state_->lookup.end()) return it->second;
  return state_->raw_h(a);
}

PairKernel KernelProjection::degenerate_kernel() const {
  return PairKernel{[self = *this](const LabeledSample& a, const LabeledSample& b) {
                      return symmetrized(self.state_->q, a, b) - self.mean_ - self.h(a) - self.h(b);
                    },
                    true, true, "projected-" + state_->q.name};
}

double KernelProjection::variance() const {
  CompensatedSum m1;
  CompensatedSum m2;
  for (std::size_t a = 0; a < state_->outcomes.size(); ++a) {
    const double p = state_->outcomes[a].prob;
    m1.add(p * state_->h[a]);
    m2.add(p * state_->h[a] * state_->h[a]);
  }
  return std::max(0.0, m2.value() - m1.value() * m1.value());
}

double kernel_mean(const PairKernel& q, const SyntheticModel& model) {
  const auto outcomes = enumerate_outcomes(model);
  CompensatedSum s;
  for (const auto& a : outcomes) {
    for (const auto& b : outcomes) s.add(a.prob * b.prob * q(a.sample, b.sample));
  }
  return s.value();
}

HoeffdingParts hoeffding_decompose(const PairKernel& q, const Dataset& data, const SyntheticModel& model,
                                   const ProjectionOptions& options) {
  data.require_pairs("hoeffding_decompose");
  const std::size_t n = data.size();
  HoeffdingParts parts;
  parts.h_values.resize(n);

  if (q.degenerate) {
    // Both projections vanish by promise, so mean and h are zero.
    CompensatedSum u;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) u.add(2.0 * symmetrized(q, data[i], data[j]));
    }
    parts.u_n = u.value() / (static_cast<double>(n) * static_cast<double>(n - 1));
    parts.w_n = parts.u_n;
    return parts;
  }
  if (model.has_discrete_labels()) {
    const KernelProjection proj(q, model);
    parts.mean = proj.mean();
    for (std::size_t i = 0; i < n; ++i) parts.h_values[i] = proj.h(data[i]);
  } else {
    if (options.mc_inner < 2) throw InvalidArgument("hoeffding_decompose: mc_inner must be >= 2");
    const Dataset ref = sample_dataset(model, options.mc_inner, options.seed);
    const std::size_t half = ref.size() / 2;
    CompensatedSum mu;
    for (std::size_t k = 0; k < half; ++k) mu.add(symmetrized(q, ref[k], ref[half + k]));
    parts.mean = mu.value() / static_cast<double>(half);
    for (std::size_t i = 0; i < n; ++i) {
      CompensatedSum s;
      for (const auto& r : ref) s.add(symmetrized(q, data[i], r));
      parts.h_values[i] = s.value() / static_cast<double>(ref.size()) - parts.mean;
    }
    parts.approximate = true;
  }

  parts.t_n = compensated_total(parts.h_values) / static_cast<double>(n);
  CompensatedSum u;
  CompensatedSum w;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double qs = symmetrized(q, data[i], data[j]);
      u.add(2.0 * qs);
      w.add(2.0 * (qs - parts.mean - parts.h_values[i] - parts.h_values[j]));
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  parts.u_n = u.value() / pairs;
  parts.w_n = w.value() / pairs;
  return parts;
}

double conditional_variance(const PairKernel& q, const SyntheticModel& model) {
  return KernelProjection(q, model).variance();
}

double degeneracy_check(const PairKernel& q, const SyntheticModel& model) {
  const auto outcomes = enumerate_outcomes(model);
  double worst = 0.0;
  for (const auto& a : outcomes) {
    CompensatedSum left;
    CompensatedSum right;
    for (const auto& b : outcomes) {
      left.add(b.prob * q(a.sample, b.sample));
      right.add(b.prob * q(b.sample, a.sample));
    }
    worst = std::max({worst, std::abs(left.value()), std::abs(right.value())});
  }
  return worst;
}

// ---------------------------------------------------------------------------

ChaosStats chaos_statistics(std::span<const PairKernel> kernels, const Dataset& data, RngSeed seed) {
  Rng rng(seed);
  std::vector<int> eps(data.size());
  for (auto& e : eps) e = rng.rademacher();
  return chaos_statistics(kernels, data, std::move(eps));
}

ChaosStats chaos_statistics(std::span<const PairKernel> kernels, const Dataset& data, std::vector<int> eps) {
  require_kernels(kernels);
  data.require_pairs("chaos_statistics");
  const std::size_t n = data.size();
  if (eps.size() != n) throw InvalidArgument("chaos_statistics: sign vector length differs from n");

  ChaosStats out;
  for (const auto& f : kernels) {
    const auto fm = kernel_matrix(f, data);
    CompensatedSum z;
    CompensatedSum norm2;
    for (std::size_t j = 0; j < n; ++j) {
      CompensatedSum v;
      for (std::size_t i = 0; i < n; ++i) v.add(eps[i] * fm[i * n + j]);
      const double vj = v.value();
      z.add(eps[j] * vj);
      norm2.add(vj * vj);
      out.m_stat = std::max(out.m_stat, std::abs(vj));
    }
    out.z_eps = std::max(out.z_eps, std::abs(z.value()));
    out.u_eps = std::max(out.u_eps, std::sqrt(norm2.value()));
  }
  out.eps = std::move(eps);
  return out;
}

double chaos_sup(std::span<const PairKernel> kernels, const Dataset& data) {
  require_kernels(kernels);
  data.require_pairs("chaos_sup");
  const std::size_t n = data.size();
  double best = 0.0;
  for (const auto& f : kernels) {
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s.add(f(data[i], data[j]));
      }
    }
    best = std::max(best, std::abs(s.value()));
  }
  return best;
}

}  // namespace urank
