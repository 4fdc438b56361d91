#pragma once

#include "sscosamp/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace sscosamp {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for a structured path under `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t component) {
  return mix64(parent ^ mix64(component + 0x632be59bd9b4e019ULL));
}

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t first,
                                    Rest... rest) {
  return derive_seed(derive_seed(parent, first), static_cast<std::uint64_t>(rest)...);
}

/// FNV-1a, for folding labels into seed paths.
constexpr std::uint64_t label_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Standard complex Gaussian: E|z|^2 = 1.
inline Complex complex_normal(Rng& gen) {
  std::normal_distribution<Real> normal(0.0, std::sqrt(0.5));
  const Real re = normal(gen);
  const Real im = normal(gen);
  return {re, im};
}

inline Vector complex_normal_vector(Index len, Rng& gen) {
  Vector v(len);
  for (Index i = 0; i < len; ++i) v(i) = complex_normal(gen);
  return v;
}

inline RealVector real_normal_vector(Index len, Rng& gen) {
  std::normal_distribution<Real> normal;
  RealVector v(len);
  for (Index i = 0; i < len; ++i) v(i) = normal(gen);
  return v;
}

}  // namespace sscosamp
