#include "urank/dataset.hpp"

#include <cmath>
#include <string>

#include "urank/errors.hpp"

namespace urank {

Dataset::Dataset(std::vector<LabeledSample> samples) : samples_(std::move(samples)) {
  dim_ = samples_.empty() ? 0 : samples_.front().x.size();
  validate();
}

Dataset::Dataset(std::size_t dim, std::vector<LabeledSample> samples)
    : dim_(dim), samples_(std::move(samples)) {
  validate();
}

void Dataset::validate() {
  if (!samples_.empty() && dim_ == 0) {
    throw ParseError("dataset: samples must have at least one feature");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.x.size() != dim_) {
      throw ParseError("dataset: sample " + std::to_string(i) + " has dimension " +
                       std::to_string(s.x.size()) + ", expected " + std::to_string(dim_));
    }
    for (double v : s.x) {
      if (!std::isfinite(v)) {
        throw ParseError("dataset: non-finite feature in sample " + std::to_string(i));
      }
    }
    if (!std::isfinite(s.y)) {
      throw ParseError("dataset: non-finite label in sample " + std::to_string(i));
    }
  }
}

std::vector<double> Dataset::labels() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.y);
  return out;
}

void Dataset::require_pairs(const char* operation) const {
  if (samples_.size() < 2) {
    throw InvalidArgument(std::string(operation) + ": need at least 2 samples, got " +
                          std::to_string(samples_.size()));
  }
}

}  // namespace urank
