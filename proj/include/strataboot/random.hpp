#pragma once

#include <cstdint>
#include <limits>

namespace strataboot {

// (seed, stream) pair identifying one independent random stream. Bootstrap
// replicate b and simulation replication r each get their own stream, so a
// result never depends on the order in which workers pick up work.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives a child seed, e.g. the bootstrap seed of simulation replication r.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64_mix(splitmix64_mix(seed + 0x9E3779B97F4A7C15ULL) ^
                        splitmix64_mix(salt + 0xD1B54A32D192ED03ULL));
}

// xoshiro256** keyed by (seed, stream). All derived draws below are written
// out explicitly; no std:: distribution is used, so sequences are identical
// across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngState state);
  Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngState{seed, stream}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform in (0, 1].
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  // Box-Muller; the second variate is discarded.
  double normal() noexcept;
  // Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
  double gamma(double shape, double scale) noexcept;
  double pareto(double scale, double shape) noexcept;
  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }

 private:
  std::uint64_t s_[4];
};

}  // namespace strataboot
