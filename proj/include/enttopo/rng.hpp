#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace enttopo {

/// Seeded random source used everywhere randomness is needed.
///
/// std::mt19937_64 output is fully specified by the standard, and the bounded
/// draws below avoid std::uniform_int_distribution (whose mapping is
/// implementation-defined), so identical seeds give identical streams on any
/// platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Unbiased draw from [0, n). n must be nonzero.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) {
        return r % n;
      }
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// First k entries of a seeded permutation of `values` (partial
  /// Fisher-Yates); used for sampling without replacement.
  template <typename T>
  std::vector<T> sample(std::vector<T> values, std::size_t k) {
    if (k > values.size()) {
      k = values.size();
    }
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(values.size() - i));
      std::swap(values[i], values[j]);
    }
    values.resize(k);
    return values;
  }

private:
  std::mt19937_64 gen_;
};

} // namespace enttopo
