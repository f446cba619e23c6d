#pragma once

// Deterministic random streams. Only the engine (std::mt19937_64, whose output
// sequence is fixed by the standard) comes from the library; the distributions
// are implemented here because the std:: ones differ across implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace hsival {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Independent sub-seed for (seed, stream, index). Streams keep e.g. fold 3 of a
/// patch split and run 3 of a random split from sharing a sequence.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (index * 0xd1b54a32d192ed03ull));
}

namespace stream {
inline constexpr std::uint64_t patch_fold = 0x5041544348ull;
inline constexpr std::uint64_t random_run = 0x52414e44ull;
inline constexpr std::uint64_t validation = 0x56414cull;
inline constexpr std::uint64_t synth_sites = 0x53495445ull;
inline constexpr std::uint64_t synth_signature = 0x5349474eull;
inline constexpr std::uint64_t synth_noise = 0x4e4f4953ull;
inline constexpr std::uint64_t synth_iid = 0x494944ull;
inline constexpr std::uint64_t synth_unlabeled = 0x554e4cull;
} // namespace stream

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform();
    while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Partial Fisher-Yates: moves a uniform k-subset of `pool` to its front and
/// returns it in draw order. Depends only on pool order and the stream.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + std::size_t(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

} // namespace hsival
