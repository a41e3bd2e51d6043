#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

// Deterministic random streams. The simulator's reproducibility contracts
// (same seed => bit-identical results, independent of platform and thread
// count) rule out std::normal_distribution and friends, whose output is
// implementation-defined. Everything here is pinned algorithmically:
// splitmix64 for seeding/derivation, xoshiro256** as the stream engine,
// 53-bit uniforms, and Marsaglia's polar method for normals.

namespace ecmsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream labels so that every consumer of randomness draws from its own
// derived stream; adding consumers never reorders existing draws.
enum class StreamTag : std::uint64_t {
  variability = 1,
  imprint = 2,
  register_phase = 3,
  test_phase = 4,
  train_order = 5,
  train_noise = 6,
  offsets = 7,
  random_layer = 8,
  sweep = 9,
};

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return splitmix64(base ^ splitmix64(a + 0x632be59bd9b4e019ull));
}
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c) {
  return derive_seed(derive_seed(base, a, b), c);
}
inline std::uint64_t derive_seed(std::uint64_t base, StreamTag tag) {
  return derive_seed(base, static_cast<std::uint64_t>(tag));
}
inline std::uint64_t derive_seed(std::uint64_t base, StreamTag tag, std::uint64_t i) {
  return derive_seed(base, static_cast<std::uint64_t>(tag), i);
}
inline std::uint64_t derive_seed(std::uint64_t base, StreamTag tag, std::uint64_t i,
                                 std::uint64_t j) {
  return derive_seed(base, static_cast<std::uint64_t>(tag), i, j);
}

// Bit pattern of a double, for deriving sweep-point seeds from the point's
// value rather than its index (inserting grid points must not perturb
// existing points).
inline std::uint64_t seed_key(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  return bits;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) {
      x = splitmix64(x);
      word = x;
    }
    has_spare_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
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
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0. Rejection-free modulo bias is
  // negligible for the n used here (dataset sizes << 2^64), but we still use
  // Lemire's multiply-shift reduction for a clean mapping.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Marsaglia's polar method (no trig, deterministic
  // draw order, one cached spare).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_;
};

}  // namespace ecmsim
