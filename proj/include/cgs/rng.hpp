#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace cgs {

// Thin wrapper over mt19937_64. Uniform draws are implemented here rather than
// through <random> distributions so streams are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if ((n & (n - 1)) == 0) return engine_() & (n - 1);
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Uniform big integer in [0, n), n > 0.
  mpz_class below(const mpz_class& n) {
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    const std::size_t words = (bits + 63) / 64;
    const unsigned top = static_cast<unsigned>(bits - (words - 1) * 64);
    mpz_class r;
    do {
      r = 0;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t x = engine_();
        if (w == 0 && top < 64) x &= (std::uint64_t{1} << top) - 1;
        r <<= 64;
        r += mpz_class(static_cast<unsigned long>(x));
      }
    } while (r >= n);
    return r;
  }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
      auto j = static_cast<decltype(i)>(below(static_cast<std::uint64_t>(i + 1)));
      std::swap(first[i], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cgs
