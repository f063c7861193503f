#pragma once

#include <cstdint>
#include <limits>

namespace keyflow {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream identifiers so that candidate draws, scorer noise, flow noise and
// trajectory randomization never share a stream for the same seed.
enum class Stream : std::uint64_t {
  kCandidates = 1,
  kScorerNoise = 2,
  kFlowNoise = 3,
  kTrajectory = 4,
};

/// Counter-based seed for (seed, stream, index).
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

/// Minimal UniformRandomBitGenerator over splitmix64; cheap to construct, so
/// it can be created per call for keyed, order-independent draws.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace keyflow
