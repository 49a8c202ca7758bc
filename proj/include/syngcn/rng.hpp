#pragma once

#include <cstdint>

namespace syngcn {

// SplitMix64 generator. Chosen over std::mt19937_64 because the standard
// distributions are implementation-defined; every draw here is bit-identical
// across platforms, which the deterministic mode relies on.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Independent stream addressed by up to three indices. Streams for
  // different keys never collide in practice; draws do not depend on how
  // many draws other streams made, so work can be scheduled freely.
  static Rng keyed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    Rng r(seed);
    r.state_ = mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
    return r;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }

  uint64_t state_;
};

}  // namespace syngcn
