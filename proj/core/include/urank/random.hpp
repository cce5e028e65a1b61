#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace urank {

/// Seed of a reproducible random stream.
struct RngSeed {
  std::uint64_t value = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Seed of replicate `index` derived from a base seed (base + index), so that
/// parallel and serial replication produce the same streams.
constexpr RngSeed replicate_seed(RngSeed base, std::uint64_t index) {
  return RngSeed{base.value + index};
}

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard <random> distributions are implementation-defined,
/// so all variates are derived here from raw 64-bit draws instead:
///  - uniform: top 53 bits, mapped to (0, 1]
///  - normal: Box-Muller (both variates of a pair are used)
///  - Rademacher sign: top bit
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform();

  /// Standard gaussian variate.
  double normal();

  /// +1 or -1 with probability 1/2 each.
  int rademacher() { return (next() >> 63) != 0 ? 1 : -1; }

  /// Index k with probability p_k given the cumulative distribution
  /// (cdf.back() is treated as 1).
  std::size_t discrete(std::span<const double> cdf);

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace urank
