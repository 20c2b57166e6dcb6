#pragma once

#include <cstdint>
#include <random>

namespace levyflat {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed-splitting rule used everywhere a run fans out:
///   derive_seed(seed, index) = mix64(seed ^ mix64(index + 1)).
/// Distinct (seed, index) pairs give statistically independent substreams;
/// nesting (derive_seed(derive_seed(s, path), stream)) is the convention for
/// per-path, per-coordinate streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed ^ mix64(index + 1));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(derive_seed(seed, stream));
}

}  // namespace levyflat
