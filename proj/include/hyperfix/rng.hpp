#ifndef HYPERFIX_RNG_HPP
#define HYPERFIX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace hyperfix {

/// Deterministic random source. Distributions are implemented by hand so the
/// stream depends only on the seed, not on the standard library's
/// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(gen_() % n);
  }

  /// Uniform integer in [lo, hi] inclusive.
  long long integer(long long lo, long long hi) {
    return lo + static_cast<long long>(gen_() % static_cast<std::uint64_t>(
                                                    hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hyperfix

#endif
