#include "urank/roc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "urank/errors.hpp"
#include "urank/numeric.hpp"
#include "urank/risk.hpp"

namespace urank {
namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts check_binary(std::span<const double> scores, std::span<const double> labels, const char* op) {
  if (scores.size() != labels.size()) throw InvalidArgument(std::string(op) + ": length mismatch");
  ClassCounts c;
  for (double y : labels) {
    if (y == 1.0) {
      ++c.pos;
    } else if (y == -1.0) {
      ++c.neg;
    } else {
      throw InvalidArgument(std::string(op) + ": labels must be -1 or +1");
    }
  }
  if (c.pos == 0 || c.neg == 0) throw InvalidArgument(std::string(op) + ": both classes must be present");
  return c;
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

// Sweep thresholds in decreasing order given per-item masses of each class.
RocCurve sweep(std::span<const double> scores, std::span<const double> pos_mass,
               std::span<const double> neg_mass) {
  const auto idx = order_by_score(scores, true);
  CompensatedSum pos_total;
  CompensatedSum neg_total;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    pos_total.add(pos_mass[k]);
    neg_total.add(neg_mass[k]);
  }
  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  CompensatedSum tp;
  CompensatedSum fp;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp.add(pos_mass[idx[j]]);
      fp.add(neg_mass[idx[j]]);
      ++j;
    }
    curve.points.push_back({std::min(1.0, fp.value() / neg_total.value()),
                            std::min(1.0, tp.value() / pos_total.value())});
    i = j;
  }
  curve.points.back() = {1.0, 1.0};
  return curve;
}

}  // namespace

double RocCurve::tpr_at(double fpr) const {
  double best = -1.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const auto& a = points[k];
    const auto& b = points[k + 1];
    if (fpr < a.fpr || fpr > b.fpr) continue;
    if (b.fpr == a.fpr) {
      best = std::max({best, a.tpr, b.tpr});
    } else {
      best = std::max(best, a.tpr + (b.tpr - a.tpr) * (fpr - a.fpr) / (b.fpr - a.fpr));
    }
  }
  if (best < 0.0) throw InvalidArgument("RocCurve::tpr_at: fpr outside the curve");
  return best;
}

double RocCurve::area() const {
  CompensatedSum s;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    s.add(0.5 * (points[k + 1].fpr - points[k].fpr) * (points[k + 1].tpr + points[k].tpr));
  }
  return s.value();
}

RocCurve roc_curve(std::span<const double> scores, std::span<const double> labels) {
  check_binary(scores, labels, "roc_curve");
  std::vector<double> pos(scores.size());
  std::vector<double> neg(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    pos[k] = labels[k] == 1.0 ? 1.0 : 0.0;
    neg[k] = labels[k] == 1.0 ? 0.0 : 1.0;
  }
  return sweep(scores, pos, neg);
}

RocCurve true_roc(const SyntheticModel& model, const ScoringFunction& s) {
  const auto* b = model.bipartite();
  if (b == nullptr) throw UnsupportedModel("true_roc: requires a bipartite model");
  const std::size_t k = b->eta.size();
  std::vector<double> scores(k);
  std::vector<double> pos(k);
  std::vector<double> neg(k);
  for (std::size_t a = 0; a < k; ++a) {
    scores[a] = s(b->marginal.points[a]);
    pos[a] = b->marginal.probs[a] * b->eta[a];
    neg[a] = b->marginal.probs[a] * (1.0 - b->eta[a]);
  }
  double pt = 0.0;
  double nt = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    pt += pos[a];
    nt += neg[a];
  }
  if (pt <= 0.0 || nt <= 0.0) throw InvalidArgument("true_roc: both classes need positive probability");
  return sweep(scores, pos, neg);
}

double auc(std::span<const double> scores, std::span<const double> labels) {
  const auto c = check_binary(scores, labels, "auc");
  const auto idx = order_by_score(scores, false);
  // Twice the rank sum of the positives, with tied groups at their midrank.
  std::int64_t two_rank_sum = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    std::int64_t group_pos = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      if (labels[idx[j]] == 1.0) ++group_pos;
      ++j;
    }
    two_rank_sum += group_pos * static_cast<std::int64_t>(i + 1 + j);
    i = j;
  }
  const auto np = static_cast<std::int64_t>(c.pos);
  const auto nn = static_cast<std::int64_t>(c.neg);
  const std::int64_t two_u = two_rank_sum - np * (np + 1);
  return static_cast<double>(two_u) / static_cast<double>(2 * np * nn);
}

double auc_brute(std::span<const double> scores, std::span<const double> labels) {
  const auto c = check_binary(scores, labels, "auc_brute");
  std::int64_t credit = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1.0) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != -1.0) continue;
      if (scores[i] > scores[j]) {
        credit += 2;
      } else if (scores[i] == scores[j]) {
        credit += 1;
      }
    }
  }
  return static_cast<double>(credit) / static_cast<double>(2 * c.pos * c.neg);
}

double true_auc(const SyntheticModel& model, const ScoringFunction& s) {
  const auto* b = model.bipartite();
  if (b == nullptr) throw UnsupportedModel("true_auc: requires a bipartite model");
  const std::size_t k = b->eta.size();
  std::vector<double> scores(k);
  CompensatedSum pt;
  CompensatedSum nt;
  for (std::size_t a = 0; a < k; ++a) {
    scores[a] = s(b->marginal.points[a]);
    pt.add(b->marginal.probs[a] * b->eta[a]);
    nt.add(b->marginal.probs[a] * (1.0 - b->eta[a]));
  }
  if (pt.value() <= 0.0 || nt.value() <= 0.0) {
    throw InvalidArgument("true_auc: both classes need positive probability");
  }
  CompensatedSum acc;
  for (std::size_t a = 0; a < k; ++a) {
    const double wa = b->marginal.probs[a] * b->eta[a];
    for (std::size_t c = 0; c < k; ++c) {
      const double w = wa * b->marginal.probs[c] * (1.0 - b->eta[c]);
      if (scores[a] > scores[c]) {
        acc.add(w);
      } else if (scores[a] == scores[c]) {
        acc.add(0.5 * w);
      }
    }
  }
  return acc.value() / (pt.value() * nt.value());
}

RiskAucIdentity risk_auc_identity(std::span<const double> scores, std::span<const double> labels) {
  const auto c = check_binary(scores, labels, "risk_auc_identity");
  RiskAucIdentity out;
  out.l_n = empirical_risk(scores, labels);
  out.auc_n = auc(scores, labels);
  const double n = static_cast<double>(scores.size());
  const double rhs = 2.0 * static_cast<double>(c.pos) * static_cast<double>(c.neg) * (1.0 - out.auc_n) /
                     (n * (n - 1.0));
  out.residual = std::abs(out.l_n - rhs);
  return out;
}

RiskAucIdentity risk_auc_identity(const Dataset& data, const ScoringFunction& s) {
  const auto scores = scores_of(s, data);
  const auto labels = data.labels();
  return risk_auc_identity(scores, labels);
}

}  // namespace urank
