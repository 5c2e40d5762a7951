#pragma once

#include <cstdint>
#include <limits>

namespace robust_bandits {

/// Named random streams. Each component draws from its own stream so that
/// swapping one learner or attack does not perturb any other draw.
enum class Stream : std::uint64_t {
  instance = 1,
  contexts = 2,
  noise = 3,
  learner = 4,
  adversary = 5,
};

/// Counter-based generator: output n is a keyed bijective mix of n, so the
/// state is just (key, counter). Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, Stream stream)
      : key_(mix(mix(seed + kGolden) ^ (static_cast<std::uint64_t>(stream) * kStreamSalt))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + kGolden * ++counter_); }

  std::uint64_t counter() const { return counter_; }

  /// Jump to an absolute position in the stream.
  void seek(std::uint64_t position) { counter_ = position; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace robust_bandits
