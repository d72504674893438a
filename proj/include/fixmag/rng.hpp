#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fixmag {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the Philox key; the counter block is
/// (block index low, block index high, stream low, stream high), so every
/// (seed, stream) pair is an independent sequence and streams can be derived
/// without coordination. Satisfies UniformRandomBitGenerator.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr const char* kName = "philox4x32-10";

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0);

  /// The raw bijection: ten rounds on `counter` under `key`.
  static Block block(Block counter, Key key);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  /// A generator on the same seed with a different stream id.
  Philox derive(std::uint64_t stream) const { return Philox(seed_, stream); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int pos_ = 4;
};

/// In-place Fisher-Yates shuffle driven by a Philox stream.
template <class It>
void shuffle(It first, It last, Philox& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.below(i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace fixmag
