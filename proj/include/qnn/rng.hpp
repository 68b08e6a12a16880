#pragma once

#include <cstdint>
#include <initializer_list>

// Counter-based random streams.
//
// A stream is a 64-bit key derived from the master seed and a tuple of
// coordinates (purpose, module, repetition, output column, ...). The i-th
// draw of a stream is a pure function of (key, i), so any partition of the
// draws across threads reproduces the same values bit for bit.

namespace qnn::rng {

struct StreamKey {
  std::uint64_t value = 0;
  friend bool operator==(StreamKey, StreamKey) = default;
};

/// Purpose tags keep streams used for different jobs disjoint.
enum class Purpose : std::uint64_t {
  MarginalShots = 0x6d61726731ull,
  JointShots = 0x6a6f696e74ull,
  Partition = 0x70617274ull,
  Datum = 0x646174756dull,
  Fixture = 0x66697874ull,
};

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

StreamKey derive(std::uint64_t seed, Purpose purpose, std::initializer_list<std::uint64_t> coords);

/// Raw 64-bit draw number `counter` of a stream.
constexpr std::uint64_t draw(StreamKey key, std::uint64_t counter) noexcept {
  return mix64(key.value + (counter + 1) * kGamma);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double uniform(StreamKey key, std::uint64_t counter) noexcept {
  return static_cast<double>(draw(key, counter) >> 11) * 0x1.0p-53;
}

/// Sequential generator over a stream; satisfies UniformRandomBitGenerator so
/// it can drive <random> distributions and std::shuffle.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  explicit StreamEngine(StreamKey key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() noexcept { return draw(key_, counter_++); }
  double uniform01() noexcept { return rng::uniform(key_, counter_++); }

 private:
  StreamKey key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qnn::rng
