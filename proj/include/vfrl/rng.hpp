#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vfrl {

using Rng = std::mt19937_64;

// Named sub-streams of one master seed. Each consumer draws from its own
// engine so adding draws in one place never shifts another stream.
enum class Stream : std::uint32_t {
  kEnv = 1,
  kNoise = 2,
  kInit = 3,
  kScenario = 4,
  kReplay = 5,
  kSynth = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace vfrl
