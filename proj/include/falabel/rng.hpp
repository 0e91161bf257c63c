#pragma once

// All randomness in the library flows through mt19937_64 seeded explicitly.
// Standard distributions are implementation-defined, so the draws below are
// hand-rolled to keep results identical across platforms and compilers.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace falabel {

using Rng = std::mt19937_64;

// splitmix64; used to derive child seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return mix_seed(a ^ mix_seed(b));
}

// FNV-1a, for folding names into seed derivations.
inline std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Unbiased draw in [0, n) by rejection.
inline std::uint64_t next_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates over index vectors.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(next_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace falabel
