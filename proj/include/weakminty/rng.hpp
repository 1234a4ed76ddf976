#ifndef WEAKMINTY_RNG_HPP
#define WEAKMINTY_RNG_HPP

#include <cstdint>
#include <limits>

namespace weakminty {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Small uniform random bit generator (SplitMix64 stream). Used with the
/// <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Identity of one oracle sample ξ. All randomness of a sample is a pure
/// function of (seed, counter), so evaluating the oracle at several points
/// under one ticket is a replay.
struct SampleTicket {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  friend constexpr bool operator==(const SampleTicket&, const SampleTicket&) = default;

  /// Fresh generator positioned at the start of this ticket's stream.
  SplitMix64 stream() const noexcept { return SplitMix64(mix64(seed ^ mix64(counter + 0x632be59bd9b4e019ULL))); }
};

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(SplitMix64& g) noexcept {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace weakminty

#endif  // WEAKMINTY_RNG_HPP
