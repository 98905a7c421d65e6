#pragma once

#include <cmath>
#include <cstdint>

namespace gfluct {

// SplitMix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash2(std::uint64_t a, std::uint64_t b) {
  return mix64(a + 0x9e3779b97f4a7c15ULL * (b + 1));
}

// Stream purposes get fixed tags so that e.g. label and edge streams derived
// from the same seed never collide.
enum class StreamKind : std::uint64_t {
  kLabels = 0x6c61626cULL,
  kEdges = 0x65646765ULL,
  kReplication = 0x7265706cULL,
  kCoupling = 0x63706c67ULL,
  kChaos = 0x63686173ULL,
  kGeneric = 0x67656e72ULL,
};

inline std::uint64_t derive_key(std::uint64_t seed, StreamKind kind,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t k = hash2(seed, static_cast<std::uint64_t>(kind));
  k = hash2(k, a);
  k = hash2(k, b);
  return k;
}

// Counter-based stream: draw t is a pure function of (key, t), so a stream
// keyed per edge/vertex/replication produces the same values no matter in
// which order streams are consumed or on how many threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform on [0,1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Gamma(shape, 1) by Marsaglia-Tsang; shapes below 1 use the boost
  // Gamma(a) = Gamma(a+1) * U^(1/a).
  double next_gamma(double shape) {
    if (shape < 1.0) {
      const double u = next_unit_open();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_gaussian();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = next_unit_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    const double x = next_gamma(a);
    const double y = next_gamma(b);
    return x / (x + y);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gfluct
