#pragma once

// Counter-based seed derivation. Every random quantity in a simulation is
// drawn from a generator seeded by hashing (seed, tags...), so results do
// not depend on evaluation order or on how work is split across threads.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace mpb::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// One fair bit per counter value; used for data bits that must be
// addressable by symbol index.
inline int sign_bit(std::uint64_t key, std::uint64_t counter) {
  return (splitmix64(key ^ splitmix64(counter)) >> 63) ? -1 : 1;
}

// Stream tags.
enum Stream : std::uint64_t {
  kRealization = 1,
  kData = 2,
  kNoiseOnly = 3,
  kSoiBits = 4,
  kMaiBits = 5,
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  // Circular complex Gaussian with E|z|^2 = var.
  std::complex<double> cnormal(double var = 1.0) {
    const double s = std::sqrt(var / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  // Fair +-1 values, 64 per engine draw.
  int sign() {
    if (bits_left_ == 0) {
      bits_ = engine_();
      bits_left_ = 64;
    }
    const int out = (bits_ & 1ULL) ? -1 : 1;
    bits_ >>= 1;
    --bits_left_;
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

}  // namespace mpb::rng
