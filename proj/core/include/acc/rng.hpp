#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace acc {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is addressed by a 64-bit master seed (the Philox key) and a
/// 64-bit stream index (the high half of the counter). Draws advance the low
/// half of the counter, so two streams with different indices never share a
/// block and the same (seed, index) always replays the same sequence.
///
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned position_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Stream `index` of the family keyed by `master_seed`.
RngStream substream(std::uint64_t master_seed, std::uint64_t index);

/// Mixes a tag into a seed (splitmix64 finalizer); used to give each pipeline
/// stage its own stream family.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

}  // namespace acc
