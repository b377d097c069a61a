#pragma once

#include <cstdint>

namespace gmnl {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. A stream is a (key, counter) pair; next()
/// advances the counter and hashes it, so the i-th draw of a stream depends
/// only on (key, i). Sub-streams derive a new key from the parent key and a
/// lane index:
///
///     child.key = mix64(key ^ mix64(lane + LANE_SALT))
///
/// This is the derivation used everywhere in the library: one root seed,
/// one lane per component / worker / sample, identical results regardless
/// of how the work is partitioned.
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) noexcept { return next_double() < p; }

  /// Uniform integer in [0, bound). Rejection-free modulo is fine here:
  /// bounds in this library are tiny compared to 2^64, the bias is < 2^-57.
  std::uint64_t next_below(std::uint64_t bound) noexcept { return next() % bound; }

  /// Low `bits` bits uniform, rest zero (bits in [1, 64]).
  std::uint64_t next_bits(int bits) noexcept {
    return bits >= 64 ? next() : next() & ((1ULL << bits) - 1);
  }

  constexpr RngStream derive(std::uint64_t lane) const noexcept {
    return RngStream(mix64(key_ ^ mix64(lane + 0xd1b54a32d192ed03ULL)));
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gmnl
