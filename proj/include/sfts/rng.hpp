#ifndef SFTS_RNG_HPP
#define SFTS_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace sfts {

/// Deterministic random stream. All randomness in the library flows from a
/// single user seed through named substreams, so that independent components
/// (replicates, Monte Carlo chunks, sampling stages) draw from decorrelated
/// generators regardless of evaluation order or thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Substream derived from (seed, name, index).
  static Rng stream(std::uint64_t seed, std::string_view name,
                    std::uint64_t index = 0);

  /// Uniform on [0, 1).
  double uniform();

  /// Standard normal via Box-Muller (one spare cached).
  double normal();

  /// Uniform integer on {0, ..., n-1}, n >= 1; rejection sampled, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64-style mixing, also used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view name,
                       std::uint64_t index = 0);

}  // namespace sfts

#endif
