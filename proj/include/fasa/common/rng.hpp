#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fasa {

// Seeded RNG used by every randomized component. Derivations (bounded ints,
// exponentials) are written out explicitly instead of going through
// std::*_distribution, so a given seed produces the same stream on every
// standard library implementation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased uniform integer in [0, n). Lemire's multiply-shift rejection.
  uint64_t below(uint64_t n) {
    auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<uint64_t>(wide);
    if (low < n) {
      uint64_t cutoff = (0 - n) % n;
      while (low < cutoff) {
        wide = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<uint64_t>(wide);
      }
    }
    return static_cast<uint64_t>(wide >> 64);
  }

  // Inclusive on both ends.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Inter-arrival time for a Poisson process with the given rate (events/s).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace fasa
