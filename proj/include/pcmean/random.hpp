#ifndef PCMEAN_RANDOM_HPP
#define PCMEAN_RANDOM_HPP

#include <cmath>
#include <cstdint>

namespace pcm {

/// Counter-based generator (SplitMix64): the state is a counter advanced by a
/// fixed odd step and each output is a bijective hash of it. Replicate
/// streams are derived from (seed, stream_id), so parallel simulation and
/// resampling are reproducible regardless of scheduling.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Stream `stream_id` of master seed `seed`; distinct ids give windows of
  /// the counter orbit separated by pseudorandom offsets.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
    return SplitMix64(mix(seed) ^ mix(stream_id * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer on {lo, ..., hi}, exact via rejection.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t bound = (~std::uint64_t{0} / span) * span;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= bound);
    return lo + static_cast<int>(x % span);
  }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Poisson by multiplicative products, splitting large means into chunks
  /// (sums of independent Poissons) to keep exp(-mean) in range.
  std::int64_t poisson(double mean) {
    std::int64_t k = 0;
    while (mean > 30.0) {
      k += poisson_small(30.0);
      mean -= 30.0;
    }
    return k + poisson_small(mean);
  }

private:
  std::int64_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace pcm

#endif
