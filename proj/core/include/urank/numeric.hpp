#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace urank {

/// Neumaier-compensated accumulator. Pair sums over n(n-1) terms use it so
/// that reconstruction identities hold to ~1e-15 relative.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_total(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

/// Standard gaussian distribution function.
///
/// Uses the complementary error function, Phi(x) = erfc(-x / sqrt 2) / 2,
/// which keeps full relative precision in the lower tail.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Sample mean and unbiased variance of a span.
struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};

inline MeanVariance mean_variance(std::span<const double> values) {
  MeanVariance out;
  out.count = values.size();
  if (values.empty()) return out;
  CompensatedSum s;
  for (double v : values) s.add(v);
  out.mean = s.value() / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  CompensatedSum sq;
  for (double v : values) sq.add((v - out.mean) * (v - out.mean));
  out.variance = sq.value() / static_cast<double>(values.size() - 1);
  return out;
}

}  // namespace urank
