#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gprloc {

// splitmix64. Small, fast, and fully specified here so streams are
// reproducible byte-for-byte regardless of standard library internals.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 s(a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
  return s.next();
}

// (0, 1], 53-bit resolution. Never returns 0, safe under log().
inline double u01(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

// Box-Muller gaussian stream over splitmix64.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : sm_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = u01(sm_.next());
    const double u2 = u01(sm_.next());
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  SplitMix64 sm_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gprloc
