#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace erudite {

// Seeded PRNG wrapper used everywhere randomness is needed.
//
// The core generator is std::mt19937_64 (bit-identical across platforms); all
// value transforms are implemented here instead of using std::*_distribution,
// whose output is implementation-defined. Given the same seed, every sequence
// is reproducible on any conforming compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Derive an independent child stream. splitmix64 over (seed, stream id) so
  // neighbouring ids do not produce correlated mt19937 seeds.
  Rng stream(std::uint64_t stream_id) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) return 0;
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  // Number of successes in n Bernoulli(p) trials.
  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace erudite
