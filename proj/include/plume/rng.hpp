#pragma once

#include <cstdint>
#include <random>

namespace plume {

using Engine = std::mt19937_64;

// One engine per noise source, so disabling or reordering one source never
// perturbs the draws of the others within a run.
enum class Stream : std::uint64_t {
  Init = 1,
  Counts = 2,
  Links = 3,
  Motion = 4,
  Map = 5,
  Filter = 6,
  Control = 7,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Decorrelates (base, index) pairs so consecutive indices give unrelated
// engine states; used for per-run and per-stream seed derivation.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t s = base ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  return splitmix64(s);
}

inline Engine make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(s);
  std::seed_seq seq{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Engine(seq);
}

inline Engine make_engine(std::uint64_t seed, Stream stream) {
  return make_engine(derive_seed(seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace plume
