#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ratpcp {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based split: stream `id` of run `seed` is independent of the order
// in which streams are created.
inline Rng make_stream(std::uint64_t seed, std::uint64_t id) {
  return Rng(splitmix64(seed ^ splitmix64(id + 0x632be59bd9b4e019ULL)));
}

inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t id) {
  return splitmix64(seed ^ splitmix64(id + 0x2545f4914f6cdd1dULL));
}

// Uniform in [0, 1) with 53 random bits; independent of the std library's
// distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller, again to stay independent of the standard library.
inline double gaussian(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace ratpcp
