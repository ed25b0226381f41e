#ifndef RDSNET_RNG_HPP
#define RDSNET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace rdsnet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter scheme for per-(scenario, sampler, replicate) streams: three
// splitmix rounds folding in one index each. Documented in the README;
// the experiment manifest relies on it for resumability.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(base ^ (0x9E3779B97F4A7C15ULL * (a + 1)));
  h = splitmix64(h ^ (0xBF58476D1CE4E5B9ULL * (b + 1)));
  h = splitmix64(h ^ (0x94D049BB133111EBULL * (c + 1)));
  return h;
}

// Deterministic random stream. mt19937_64 output is fixed by the standard,
// and every derived draw below avoids std::*_distribution so that identical
// seeds give identical results on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), unbiased by rejection. bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Poisson draw by inversion; halving keeps exp(-mean) away from underflow.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 60.0) {
      long half = poisson(mean / 2.0);
      return half + poisson(mean / 2.0);
    }
    const double threshold = std::exp(-mean);
    long k = 0;
    double prod = uniform01();
    while (prod > threshold) {
      ++k;
      prod *= uniform01();
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rdsnet

#endif  // RDSNET_RNG_HPP
