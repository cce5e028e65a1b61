#include "urank/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/ustat.hpp"
#include "overloaded.hpp"

namespace urank {
namespace {

using detail::Overloaded;

const DiscreteBipartite& require_bipartite(const SyntheticModel& model, const char* op) {
  const auto* b = model.bipartite();
  if (b == nullptr) {
    throw UnsupportedModel(std::string(op) + ": requires a bipartite model, got " + model.kind());
  }
  return *b;
}

std::vector<double> atom_scores(const ScoringFunction& s, const std::vector<Point>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(s(p));
  return out;
}

// E over the partner's label of q(first, second) for one ordered pair given
// P(first label > second label), with q = 1{Z r < 0} - 1{Z r* < 0}.
double excess_term(int r, int r_star, double p_greater) {
  const double if_greater = (r < 0 ? 1.0 : 0.0) - (r_star < 0 ? 1.0 : 0.0);
  const double if_less = (r > 0 ? 1.0 : 0.0) - (r_star > 0 ? 1.0 : 0.0);
  return p_greater * if_greater + (1.0 - p_greater) * if_less;
}

double noisy_h_variance(const ScoringFunction& s, const SyntheticModel& model) {
  const PairLaw law(model);
  const auto& atoms = law.atoms();
  const std::size_t k = atoms.size();
  const auto scores = atom_scores(s, law.points());
  std::vector<double> means(k);
  std::vector<double> sds(k);
  for (std::size_t a = 0; a < k; ++a) {
    const auto& g = std::get<GaussianLabel>(atoms[a].label);
    means[a] = g.mean;
    sds[a] = g.sd;
  }
  const double lambda = law.excess_from_scores(scores);

  auto h = [&](std::size_t a, double y) {
    CompensatedSum acc;
    for (std::size_t b = 0; b < k; ++b) {
      const int r_ab = scores[a] >= scores[b] ? 1 : -1;
      const int r_ba = scores[b] >= scores[a] ? 1 : -1;
      const int s_ab = means[a] >= means[b] ? 1 : -1;
      const int s_ba = means[b] >= means[a] ? 1 : -1;
      const double p = normal_cdf((y - means[b]) / sds[b]);
      acc.add(atoms[b].prob * 0.5 * (excess_term(r_ab, s_ab, p) + excess_term(r_ba, s_ba, 1.0 - p)));
    }
    return acc.value() - lambda;
  };

  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;
  CompensatedSum m1;
  CompensatedSum m2;
  for (std::size_t a = 0; a < k; ++a) {
    if (atoms[a].prob == 0.0) continue;
    auto first = [&](double e) { return normal_pdf(e) * h(a, means[a] + sds[a] * e); };
    auto second = [&](double e) {
      const double v = h(a, means[a] + sds[a] * e);
      return normal_pdf(e) * v * v;
    };
    m1.add(atoms[a].prob * Quadrature::integrate(first, -12.0, 12.0, 15, 1e-13));
    m2.add(atoms[a].prob * Quadrature::integrate(second, -12.0, 12.0, 15, 1e-13));
  }
  return std::max(0.0, m2.value() - m1.value() * m1.value());
}

}  // namespace

double empirical_risk(const RankingRule& r, const Dataset& data) {
  data.require_pairs("empirical_risk");
  const std::size_t n = data.size();
  std::vector<Point> points;
  points.reserve(n);
  for (const auto& s : data) points.push_back(s.x);
  const RuleMatrix rule(r, points);
  std::size_t mistakes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int z = label_order(data[i].y, data[j].y);
      if (z != 0 && z * rule(i, j) < 0) ++mistakes;
    }
  }
  return static_cast<double>(mistakes) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double empirical_risk(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("empirical_risk: length mismatch");
  const std::size_t n = scores.size();
  if (n < 2) throw InvalidArgument("empirical_risk: requires n >= 2");
  std::size_t mistakes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int z = label_order(labels[i], labels[j]);
      const int r = scores[i] >= scores[j] ? 1 : -1;
      if (z != 0 && z * r < 0) ++mistakes;
    }
  }
  return static_cast<double>(mistakes) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

// ---------------------------------------------------------------------------

PairLaw::PairLaw(const SyntheticModel& model) : atoms_(enumerate_support(model)) {
  const std::size_t k = atoms_.size();
  points_.reserve(k);
  for (const auto& a : atoms_) points_.push_back(a.x);
  plus_.resize(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) plus_[a * k + b] = pair_order(atoms_[a].label, atoms_[b].label).plus;
  }
}

double PairLaw::risk(const RankingRule& r) const {
  if (const ScoringFunction* s = r.scorer()) return risk_from_scores(atom_scores(*s, points_));
  const std::size_t k = size();
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = order(a, b);
      const double w = atoms_[a].prob * atoms_[b].prob;
      acc.add(w * (r(points_[a], points_[b]) < 0 ? o.plus : o.minus));
    }
  }
  return acc.value();
}

double PairLaw::risk_from_scores(std::span<const double> scores) const {
  const std::size_t k = size();
  if (scores.size() != k) throw InvalidArgument("PairLaw: one score per atom expected");
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    const double pa = atoms_[a].prob;
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = order(a, b);
      acc.add(pa * atoms_[b].prob * (scores[a] >= scores[b] ? o.minus : o.plus));
    }
  }
  return acc.value();
}

double PairLaw::excess_from_scores(std::span<const double> scores) const {
  const std::size_t k = size();
  if (scores.size() != k) throw InvalidArgument("PairLaw: one score per atom expected");
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    const double pa = atoms_[a].prob;
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = order(a, b);
      const bool r = scores[a] >= scores[b];
      const bool r_star = o.plus >= o.minus;
      if (r != r_star) acc.add(pa * atoms_[b].prob * std::abs(o.plus - o.minus));
    }
  }
  return acc.value();
}

// With stump scores in {0, d}, the rule is -1 exactly on the pairs that cross
// the cut (lower to upper for d = +1, upper to lower for d = -1). Writing
// S_ab = p_a p_b (rho+ - rho-), antisymmetric, the excess is
// base + d * sum_{a below, b above} S_ab.
StumpExcessTable::StumpExcessTable(const PairLaw& law) {
  const std::size_t k = law.size();
  if (k == 0) throw InvalidArgument("StumpExcessTable: empty support");
  const auto& atoms = law.atoms();
  const std::size_t d = atoms.front().x.size();

  std::vector<double> s(k * k);
  CompensatedSum base;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = law.order(a, b);
      s[a * k + b] = atoms[a].prob * atoms[b].prob * (o.plus - o.minus);
      if (o.plus < o.minus) base.add(atoms[a].prob * atoms[b].prob * (o.minus - o.plus));
    }
  }
  base_ = base.value();

  dims_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::size_t> order(k);
    for (std::size_t a = 0; a < k; ++a) order[a] = a;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms[a].x[j] < atoms[b].x[j]; });
    std::vector<char> below(k, 0);
    auto& dim = dims_[j];
    CompensatedSum cross;
    dim.cross.push_back(0.0);
    for (std::size_t i = 0; i < k;) {
      const double v = atoms[order[i]].x[j];
      std::size_t end = i;
      while (end < k && atoms[order[end]].x[j] == v) ++end;
      for (std::size_t g = i; g < end; ++g) below[order[g]] = 1;
      // The group leaves the upper side: drop its pairs with the lower side,
      // add its pairs with the remaining upper side.
      for (std::size_t g = i; g < end; ++g) {
        const std::size_t a = order[g];
        for (std::size_t b = 0; b < k; ++b) {
          if (b == a) continue;
          const bool in_group = atoms[b].x[j] == v;
          if (below[b] && !in_group) {
            cross.add(-s[b * k + a]);
          } else if (!below[b]) {
            cross.add(s[a * k + b]);
          }
        }
      }
      dim.values.push_back(v);
      dim.cross.push_back(cross.value());
      i = end;
    }
  }
}

double StumpExcessTable::excess(const Stump& s) const {
  if (s.dim >= dims_.size()) throw InvalidArgument("StumpExcessTable: stump dimension out of range");
  if (s.direction != 1 && s.direction != -1) throw InvalidArgument("StumpExcessTable: direction must be +1 or -1");
  const auto& dim = dims_[s.dim];
  const auto cut = static_cast<std::size_t>(
      std::lower_bound(dim.values.begin(), dim.values.end(), s.threshold) - dim.values.begin());
  return std::max(0.0, base_ + s.direction * dim.cross[cut]);
}

double StumpExcessTable::min_excess() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& dim : dims_) {
    for (double c : dim.cross) best = std::min({best, std::max(0.0, base_ + c), std::max(0.0, base_ - c)});
  }
  return best;
}

double PairLaw::bayes_risk() const {
  const std::size_t k = size();
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      const auto o = order(a, b);
      acc.add(atoms_[a].prob * atoms_[b].prob * std::min(o.plus, o.minus));
    }
  }
  return acc.value();
}

double true_risk(const RankingRule& r, const SyntheticModel& model) {
  if (!model.has_finite_support()) {
    throw UnsupportedModel("true_risk: exact risk needs a finite support; use true_risk_mc");
  }
  return PairLaw(model).risk(r);
}

MonteCarloEstimate true_risk_mc(const RankingRule& r, const SyntheticModel& model, std::size_t pairs,
                                RngSeed seed) {
  if (pairs < 2) throw InvalidArgument("true_risk_mc: needs at least 2 pairs");
  const Dataset d = sample_dataset(model, 2 * pairs, seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& a = d[2 * i];
    const auto& b = d[2 * i + 1];
    const int z = label_order(a.y, b.y);
    if (z != 0 && z * r(a.x, b.x) < 0) ++hits;
  }
  MonteCarloEstimate est;
  est.draws = pairs;
  est.value = static_cast<double>(hits) / static_cast<double>(pairs);
  est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(pairs));
  return est;
}

ScoringFunction bayes_scorer(const SyntheticModel& model) {
  return std::visit(Overloaded{
                        [](const DiscreteBipartite& b) {
                          return ScoringFunction::table(b.marginal.points, b.eta);
                        },
                        [](const NoiselessRegression& r) {
                          return ScoringFunction(CallableScorer{
                              [m = r.m](std::span<const double> x) { return m(x); }, "regression-function"});
                        },
                        [](const NoisyRegression& r) {
                          return ScoringFunction(CallableScorer{
                              [m = r.m](std::span<const double> x) { return m(x); }, "regression-function"});
                        },
                    },
                    model.variant());
}

RankingRule bayes_rule(const SyntheticModel& model) { return RankingRule(BayesRule{bayes_scorer(model)}); }

BayesRiskForms bayes_risk_forms(const SyntheticModel& model) {
  const auto& b = require_bipartite(model, "bayes_risk_forms");
  const auto& probs = b.marginal.probs;
  const std::size_t k = probs.size();
  CompensatedSum p;
  CompensatedSum emin;
  for (std::size_t a = 0; a < k; ++a) {
    p.add(probs[a] * b.eta[a]);
    for (std::size_t c = 0; c < k; ++c) emin.add(probs[a] * probs[c] * std::min(b.eta[a], b.eta[c]));
  }
  const double pv = p.value();
  BayesRiskForms f;
  f.min_form = emin.value() - pv * pv;
  f.gini_form = pv * (1.0 - pv) - 0.5 * gini_mean_difference(model);
  f.enumeration = PairLaw(model).bayes_risk();
  return f;
}

double bayes_risk(const SyntheticModel& model) {
  if (model.bipartite() != nullptr) {
    const auto f = bayes_risk_forms(model);
    if (std::abs(f.min_form - f.gini_form) > 1e-12 || std::abs(f.min_form - f.enumeration) > 1e-12) {
      throw NumericalError("bayes_risk: closed forms disagree beyond 1e-12");
    }
    return f.min_form;
  }
  if (model.noiseless() != nullptr) return 0.0;
  if (!model.has_finite_support()) {
    throw UnsupportedModel("bayes_risk: noisy regression needs a finite support");
  }
  return PairLaw(model).bayes_risk();
}

double excess_risk(const ScoringFunction& s, const SyntheticModel& model) {
  if (!model.has_finite_support()) throw UnsupportedModel("excess_risk: requires a finite support");
  const PairLaw law(model);
  return law.excess_from_scores(atom_scores(s, law.points()));
}

double h_variance(const ScoringFunction& s, const SyntheticModel& model) {
  if (!model.has_finite_support()) throw UnsupportedModel("h_variance: requires a finite support");
  if (model.has_discrete_labels()) {
    const KernelProjection proj(excess_loss_kernel(RankingRule::from_scorer(s), model), model);
    return proj.variance();
  }
  return noisy_h_variance(s, model);
}

NoiseConstant noise_constant(const SyntheticModel& model, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("noise_constant: alpha must lie in [0, 1]");
  if (model.noiseless() != nullptr) {
    throw UnsupportedModel("noise_constant: defined for bipartite and noisy regression models");
  }
  const auto atoms = enumerate_support(model);
  const auto* noisy = model.noisy();
  auto difference = [&](std::size_t a, std::size_t b) {
    if (noisy != nullptr) return delta(*noisy, atoms[a].x, atoms[b].x);
    return std::get<BernoulliLabel>(atoms[a].label).eta - std::get<BernoulliLabel>(atoms[b].label).eta;
  };

  NoiseConstant out;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (atoms[a].prob == 0.0) continue;
    CompensatedSum acc;
    CompensatedSum collision;
    for (std::size_t b = 0; b < atoms.size(); ++b) {
      const double d = std::abs(difference(a, b));
      if (d == 0.0) {
        collision.add(atoms[b].prob);
      } else {
        acc.add(atoms[b].prob * std::pow(d, -alpha));
      }
    }
    out.value = std::max(out.value, acc.value() + (alpha == 0.0 ? collision.value() : 0.0));
    out.collision_mass = std::max(out.collision_mass, collision.value());
  }
  out.atom_collision = out.collision_mass > 0.0;
  if (alpha == 0.0) out.value = 1.0;
  out.strict_value = out.atom_collision && alpha > 0.0 ? std::numeric_limits<double>::infinity() : out.value;
  return out;
}

double gini_mean_difference(const SyntheticModel& model) {
  const auto& b = require_bipartite(model, "gini_mean_difference");
  const auto& probs = b.marginal.probs;
  CompensatedSum acc;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    for (std::size_t c = 0; c < probs.size(); ++c) acc.add(probs[a] * probs[c] * std::abs(b.eta[a] - b.eta[c]));
  }
  return acc.value();
}

double delta(const NoisyRegression& model, std::span<const double> x, std::span<const double> x_prime) {
  const double s1 = model.sigma(x);
  const double s2 = model.sigma(x_prime);
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw InvalidArgument("delta: sigma must be positive at both points");
  return (model.m(x) - model.m(x_prime)) / std::sqrt(s1 * s1 + s2 * s2);
}

}  // namespace urank
