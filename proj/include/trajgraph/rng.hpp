#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace trajgraph {

// Deterministic random stream. All randomness in the library flows through
// this class so that results are reproducible bit-for-bit from a seed,
// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {
    // splitmix64 warm-up so nearby seeds give unrelated streams
    next_u64();
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  double normal(double mean = 0.0, double stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

  double cauchy(double location, double scale) {
    double u = 0.0;
    do {
      u = uniform();
    } while (u == 0.5);  // avoid tan(0) degeneracy mapping to +-inf
    return location + scale * std::tan(M_PI * (u - 0.5));
  }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stable seed derivation: FNV-1a over a textual stage tag mixed with the
// master seed and two indices. Used for per-stage / per-fold / per-item
// substreams so stages stay reproducible independently of each other.
inline uint64_t stable_seed(uint64_t master, std::string_view tag, uint64_t a = 0,
                            uint64_t b = 0) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix_byte = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ull;
  };
  auto mix_u64 = [&](uint64_t v) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(v >> (8 * i)));
  };
  mix_u64(master);
  for (char c : tag) mix_byte(static_cast<unsigned char>(c));
  mix_u64(a);
  mix_u64(b);
  // splitmix64 finalizer
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
  return h ^ (h >> 31);
}

}  // namespace trajgraph
