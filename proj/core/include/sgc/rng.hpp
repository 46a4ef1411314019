#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace sgc {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One user-facing seed fans out to named substreams ("train", "split",
// "probes", ...) so components stay independently reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream name
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                                 std::uint64_t index) {
  return splitmix64(derive_seed(seed, stream) + splitmix64(index));
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform01(Rng& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Standard normal via Box-Muller. Stateless on purpose: reproducibility must
// not depend on a cached second variate.
inline double standard_normal(Rng& rng) {
  const double u1 = ((rng() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = (rng() >> 11) * 0x1.0p-53;        // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

inline double rademacher(Rng& rng) { return (rng() & 1) ? 1.0 : -1.0; }

inline Eigen::VectorXd normal_vector(Eigen::Index d, Rng& rng) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = standard_normal(rng);
  return v;
}

}  // namespace sgc
