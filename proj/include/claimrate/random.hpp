#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Samplers built directly on std::mt19937_64 output so that shuffles and
// synthetic portfolios are bit-identical across standard libraries (the
// std:: distributions are implementation-defined).
namespace claimrate::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream per (seed, index) pair.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in (0, 1).
inline double open_unit(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * open_unit(gen);
}

/// Standard normal via Box-Muller (one draw per call).
inline double normal(std::mt19937_64& gen) {
  const double u1 = open_unit(gen);
  const double u2 = open_unit(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Poisson by sequential inversion, split into chunks so exp(-mean) never
/// underflows.
inline std::uint64_t poisson(std::mt19937_64& gen, double mean) {
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double chunk = mean > 100.0 ? 100.0 : mean;
    mean -= chunk;
    double p = std::exp(-chunk);
    double cumulative = p;
    const double u = open_unit(gen);
    std::uint64_t k = 0;
    while (u > cumulative && p > 0.0) {
      ++k;
      p *= chunk / static_cast<double>(k);
      cumulative += p;
    }
    total += k;
  }
  return total;
}

}  // namespace claimrate::rng
