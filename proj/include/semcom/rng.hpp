#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace semcom {

// 64-bit FNV-1a over raw bytes. Stable across platforms; used for seed
// derivation, cache keys, and checkpoint content hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

// Stable stream-seed derivation from (master seed, component name, index).
// Independent components and trial indices get uncorrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                                 std::uint64_t index) {
  std::uint64_t h = fnv1a64(&master, sizeof(master));
  h = fnv1a64(component.data(), component.size(), h);
  h = fnv1a64(&index, sizeof(index), h);
  return h;
}

// Counter-based splitmix64 stream. The n-th output is a pure function of
// (seed, n), so identical seeds replay identical sequences everywhere and
// distinct derived seeds give independent streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; pairs are cached for determinism.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly-symmetric complex normal with total variance `var`.
  std::complex<double> next_cgaussian(double var) {
    const double s = std::sqrt(var / 2.0);
    const double re = s * next_gaussian();
    const double im = s * next_gaussian();
    return {re, im};
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace semcom
