#pragma once

#include <cmath>
#include <cstdint>

namespace csbm {

// Generator id recorded in run manifests. Bump if any update rule below changes,
// otherwise archived seeds stop reproducing old outputs.
inline constexpr const char* kRngVersion = "splitmix64+xoshiro256pp/v1";

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// Deterministic seed combinator used to derive per-purpose / per-trial streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  SplitMix64 sm{a};
  std::uint64_t x = sm.next();
  sm.state = x ^ (b + 0x9e3779b97f4a7c15ULL);
  return sm.next();
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

// Purpose tags for substreams of a master seed. Keeping topology, labels and
// attributes on separate streams means e.g. changing the attribute dimension
// does not perturb the sampled graph structure.
enum class RngPurpose : std::uint64_t {
  labels = 0x6c61626564ULL,
  edges = 0x65646765ULL,
  attrs = 0x6174747273ULL,
  init = 0x696e6974ULL,
  mc = 0x6d63ULL,
};

/// Splittable counter-seeded generator (xoshiro256++ core, SplitMix64 seeding).
/// All draws are pure functions of the seed; no global state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
    have_spare_ = false;
  }

  // Child stream fully determined by (seed, purpose); independent of draws
  // already made from this object.
  Rng stream(RngPurpose purpose) const { return Rng(mix_seed(seed_, static_cast<std::uint64_t>(purpose))); }
  Rng stream(std::uint64_t salt) const { return Rng(mix_seed(seed_, salt)); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform01_open_left() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Plain modulo; the bias is negligible for the small bounds used here.
  std::uint64_t below(std::uint64_t bound) { return next_u64() % bound; }

  // Standard normal via Marsaglia polar; one spare cached per stream.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Laplace(location, scale) by inverse CDF.
  double laplace(double location, double scale) {
    const double u = uniform01() - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return location - scale * sign * std::log(1.0 - 2.0 * std::fabs(u));
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_;
};

}  // namespace csbm
