#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qksvm {

// Mixes a seed with an ordered list of stream coordinates (e.g. row, column,
// repeat) into a new 64-bit seed. Pure function of its inputs, so work split
// over any schedule draws identical numbers.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);

// Thin wrapper over mt19937_64 whose real-valued draws are computed here
// rather than through <random> distributions, which are not bit-portable
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qksvm
