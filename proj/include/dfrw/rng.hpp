#pragma once

#include <cstdint>
#include <random>

namespace dfrw {

using Rng = std::mt19937_64;

/// Independent deterministic stream for (seed, stream, tag).
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t tag = 0);

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int random_sign(Rng& rng) { return (rng() >> 63) != 0 ? 1 : -1; }

/// Uniform integer in [0, n).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Stream tags keep generator, walker and test-vector streams disjoint.
namespace rng_tag {
inline constexpr std::uint64_t kGenerator = 0x67656e;
inline constexpr std::uint64_t kWalker = 0x77616c6b;
inline constexpr std::uint64_t kTestVectors = 0x6b76;
inline constexpr std::uint64_t kEnsemble = 0x656e73;
}  // namespace rng_tag

}  // namespace dfrw
