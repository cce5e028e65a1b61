#include "urank/scoring.hpp"

#include <cmath>

#include "urank/errors.hpp"
#include "overloaded.hpp"

namespace urank {

using detail::Overloaded;

double EnsembleScorer::l1_norm() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.weight);
  return s;
}

double ScoringFunction::operator()(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [&](const Stump& s) {
            if (s.dim >= x.size()) throw InvalidArgument("stump: dimension out of range");
            return x[s.dim] >= s.threshold ? static_cast<double>(s.direction) : 0.0;
          },
          [&](const LinearScorer& s) {
            if (s.w.size() != x.size()) throw InvalidArgument("linear scorer: dimension mismatch");
            double v = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) v += s.w[j] * x[j];
            return v;
          },
          [&](const TableScorer& s) {
            const auto it = s.scores.find(Point(x.begin(), x.end()));
            if (it == s.scores.end()) throw InvalidArgument("table scorer: point not in table");
            return it->second;
          },
          [&](const EnsembleScorer& s) {
            double v = 0.0;
            for (const auto& t : s.terms) v += t.weight * (*t.base)(x);
            return v;
          },
          [&](const CallableScorer& s) { return s.fn(x); },
      },
      impl_);
}

ScoringFunction ScoringFunction::table(const std::vector<Point>& points,
                                       const std::vector<double>& scores) {
  if (points.size() != scores.size()) throw InvalidArgument("table scorer: length mismatch");
  TableScorer t;
  for (std::size_t k = 0; k < points.size(); ++k) t.scores[points[k]] = scores[k];
  return ScoringFunction(std::move(t));
}

ScoringFunction ScoringFunction::constant(double value) {
  return ScoringFunction(CallableScorer{[value](std::span<const double>) { return value; }, "constant"});
}

std::vector<double> scores_of(const ScoringFunction& s, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& sample : data) out.push_back(s(sample.x));
  return out;
}

// ---------------------------------------------------------------------------

double FeatureKernel::operator()(std::span<const double> a, std::span<const double> b) const {
  return std::visit(Overloaded{
                        [&](const GaussianKernel& k) {
                          if (a.size() != b.size()) throw InvalidArgument("kernel: dimension mismatch");
                          double d2 = 0.0;
                          for (std::size_t j = 0; j < a.size(); ++j) d2 += (a[j] - b[j]) * (a[j] - b[j]);
                          return std::exp(-d2 / (2.0 * k.bandwidth * k.bandwidth));
                        },
                        [&](const CustomKernel& k) { return k.fn(a, b); },
                    },
                    impl_);
}

Point pair_point(std::span<const double> x, std::span<const double> x_prime) {
  Point w;
  w.reserve(x.size() + x_prime.size());
  w.insert(w.end(), x.begin(), x.end());
  w.insert(w.end(), x_prime.begin(), x_prime.end());
  return w;
}

double KernelExpansion::operator()(std::span<const double> x, std::span<const double> x_prime) const {
  const Point w = pair_point(x, x_prime);
  double v = 0.0;
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    if (coef[j] != 0.0) v += coef[j] * kernel(anchors[j], w);
  }
  return v;
}

double KernelExpansion::rkhs_norm() const {
  double q = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (coef[i] == 0.0) continue;
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      if (coef[j] != 0.0) q += coef[i] * coef[j] * kernel(anchors[i], anchors[j]);
    }
  }
  return std::sqrt(std::max(q, 0.0));
}

double PairScorer::operator()(std::span<const double> x, std::span<const double> x_prime) const {
  return std::visit(Overloaded{
                        [&](const ScoreDifference& d) { return d.scorer(x) - d.scorer(x_prime); },
                        [&](const KernelExpansion& k) { return k(x, x_prime); },
                        [&](const CallablePairScorer& c) { return c.fn(x, x_prime); },
                    },
                    impl_);
}

// ---------------------------------------------------------------------------

int RankingRule::operator()(std::span<const double> x, std::span<const double> x_prime) const {
  return std::visit(Overloaded{
                        [&](const FromScorer& r) { return r.scorer(x) >= r.scorer(x_prime) ? 1 : -1; },
                        [&](const FromPairScorer& r) { return r.f(x, x_prime) > 0.0 ? 1 : -1; },
                        [&](const BayesRule& r) { return r.scorer(x) >= r.scorer(x_prime) ? 1 : -1; },
                        [&](const PairFunctionRule& r) { return r.fn(x, x_prime) >= 0 ? 1 : -1; },
                    },
                    impl_);
}

const ScoringFunction* RankingRule::scorer() const {
  if (const auto* r = std::get_if<FromScorer>(&impl_)) return &r->scorer;
  if (const auto* r = std::get_if<BayesRule>(&impl_)) return &r->scorer;
  return nullptr;
}

RuleMatrix::RuleMatrix(const RankingRule& rule, const std::vector<Point>& points) : n_(points.size()) {
  if (const ScoringFunction* s = rule.scorer()) {
    scores_.reserve(n_);
    for (const auto& p : points) scores_.push_back((*s)(p));
    return;
  }
  values_.resize(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      values_[i * n_ + j] = static_cast<signed char>(rule(points[i], points[j]));
    }
  }
}

}  // namespace urank
