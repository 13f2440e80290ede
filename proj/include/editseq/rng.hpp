#pragma once

#include <cstdint>
#include <cmath>
#include <string>
#include <vector>

namespace editseq {

// Deterministic PRNG with a fixed algorithm so that datasets and training
// runs are byte-identical across platforms and standard libraries.
// (std::uniform_*_distribution is implementation-defined and unsuitable.)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed + 0x9e3779b97f4a7c15ULL)) {}

  std::uint64_t next_u64() {
    // xorshift64* on a splitmix-initialized state.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  // Uniform integer in [0, n), n > 0. Rejection sampling to avoid modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  int next_int(int lo, int hi_exclusive) {
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi_exclusive - lo)));
  }

  // Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 1e-300);
    u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

// Stable FNV-1a, used for seed derivation and dataset split hashing.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a(s.data(), s.size(), h);
}

// Derives independent child seeds, e.g. (dataset seed, split name, index).
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& tag, std::uint64_t index) {
  std::uint64_t h = fnv1a(&base, sizeof(base));
  h = fnv1a(tag, h);
  h = fnv1a(&index, sizeof(index), h);
  return Rng::splitmix(h);
}

}  // namespace editseq
