#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mlsl {

// Seeded random stream with pinned output: the mapping from seed to draws is
// fixed by this code (mt19937_64 plus explicit transforms), not by
// std::*_distribution, so results are reproducible across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller, one value per call (the second is discarded so successive
  // draws never share hidden state).
  double normal(double mean, double stddev);

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n);

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::mt19937_64 gen_;
};

// Derives the seed of a named substream from a master seed. Every consumer
// owns a named stream so adding one never perturbs the others.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view name);

inline RngStream derive_stream(std::uint64_t master_seed,
                               std::string_view name) {
  return RngStream(derive_seed(master_seed, name));
}

}  // namespace mlsl
