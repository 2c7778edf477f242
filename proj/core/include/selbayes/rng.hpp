#ifndef SELBAYES_RNG_HPP
#define SELBAYES_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "selbayes/util.hpp"

namespace selbayes {

// Seedable random source for the simulator.  The engine is the standard
// mt19937_64 (its output sequence is pinned by the C++ standard), and all
// variate transforms are written out here rather than delegated to
// std::*_distribution, whose outputs vary across standard libraries.
// Identical seeds therefore produce identical populations on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) by rejection; unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::Precondition, "Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Inverse-CDF draw over `probs` in index order; assumes the entries sum
  // to ~1 and returns the last index on accumulated round-off.
  int categorical(const std::vector<double>& probs) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  // Fisher-Yates; used for quota sampling without replacement.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace selbayes

#endif  // SELBAYES_RNG_HPP
