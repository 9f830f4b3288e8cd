#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace slt {

// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
// is fixed by the standard) and implements its own distributions, because
// std::uniform_real_distribution and friends are not required to produce the
// same values across standard library implementations. Every stochastic
// component in the library draws through this class, so a run is reproducible
// from its seed on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller; caches the spare value.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % n;
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 of (base ^ rotated tag); derives independent seeds for
// subordinate streams without consuming state from any Rng.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag);

// Fisher-Yates permutation of 0..n-1 driven by rng.below.
std::vector<int> random_permutation(int n, Rng& rng);

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace slt
