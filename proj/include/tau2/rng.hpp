#pragma once

#include <cstdint>
#include <limits>

namespace tau2 {

/// Independent substreams drawn from one seed. The order here is part of
/// the reproducibility contract: matrix, then signal, then noise.
enum class Stream : std::uint64_t {
  Matrix = 0,
  Signal = 1,
  Noise = 2,
  Augment = 3,
  Sampler = 4,
  PowerIteration = 5,
};

/// Counter-based generator: the k-th output is a pure function of
/// (key, k), where key is derived from (seed, stream). Satisfies
/// UniformRandomBitGenerator so the <random> distributions can drive it.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, Stream stream)
      : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  /// Child generator keyed on this generator's key and a sub-stream id.
  CounterRng split(std::uint64_t sub) const { return CounterRng(key_, sub); }

  std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tau2
