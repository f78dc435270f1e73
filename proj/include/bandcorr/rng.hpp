#ifndef BANDCORR_RNG_HPP
#define BANDCORR_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "bandcorr/types.hpp"

namespace bandcorr::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// xoshiro256++ with the state expanded from a 64-bit key via splitmix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t key) {
    std::uint64_t s = key;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// Standard-normal substream for one Monte Carlo sample.  The stream is a
/// pure function of (seed, index), so any scheduling of samples over workers
/// reproduces the same draws.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t index)
      : gen_(stream_key(seed, index)) {}

  Real uniform() { return static_cast<Real>(gen_.next() >> 11) * 0x1.0p-53; }

  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    while (true) {
      const Real u = 2.0 * uniform() - 1.0;
      const Real v = 2.0 * uniform() - 1.0;
      const Real s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        const Real f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
      }
    }
  }

  static std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    return splitmix64(s);
  }

 private:
  Xoshiro256pp gen_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace bandcorr::rng

#endif
