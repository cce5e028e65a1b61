#pragma once

#include <cstddef>
#include <vector>

namespace urank {

/// One observation: a feature vector and its real-valued label.
struct LabeledSample {
  std::vector<double> x;
  double y = 0.0;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

/// Ordered i.i.d. training sample. Immutable after construction; every sample
/// has the same dimension d >= 1 and finite coordinates.
class Dataset {
 public:
  Dataset() = default;

  /// Infers d from the first sample. Throws ParseError on dimension mismatch
  /// or non-finite values; an empty list yields an empty dataset with d = 0.
  explicit Dataset(std::vector<LabeledSample> samples);

  /// Explicit dimension, which also allows an empty dataset of known d.
  Dataset(std::size_t dim, std::vector<LabeledSample> samples);

  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] bool empty() const { return samples_.empty(); }

  [[nodiscard]] const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
  [[nodiscard]] const std::vector<LabeledSample>& samples() const { return samples_; }
  [[nodiscard]] auto begin() const { return samples_.begin(); }
  [[nodiscard]] auto end() const { return samples_.end(); }

  [[nodiscard]] std::vector<double> labels() const;

  /// Throws InvalidArgument unless n >= 2.
  void require_pairs(const char* operation) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  void validate();

  std::size_t dim_ = 0;
  std::vector<LabeledSample> samples_;
};

/// Z = (y - y') / 2. Antisymmetric in its arguments.
constexpr double z_value(double y, double y_prime) { return (y - y_prime) / 2.0; }

/// Sign of Z as -1, 0 or +1.
constexpr int label_order(double y, double y_prime) {
  return y > y_prime ? 1 : (y < y_prime ? -1 : 0);
}

}  // namespace urank
