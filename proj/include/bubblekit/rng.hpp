#pragma once

#include <cmath>
#include <cstdint>

namespace bubblekit {

// Counter-based stream: the state is a pure function of (seed, index), so
// sample i draws the same values no matter in which order samples are taken.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index) {
    state_ = mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(index + 0xbf58476d1ce4e5b9ULL);
    state_ = mix(state_);
    have_gauss_ = false;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_gauss_) {
      have_gauss_ = false;
      return cached_gauss_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_gauss_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double cached_gauss_ = 0.0;
  bool have_gauss_;
};

}  // namespace bubblekit
