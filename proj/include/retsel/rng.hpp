#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "retsel/errors.hpp"

namespace retsel {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent stream seed for a named purpose ("split", "train/health/r2", ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return splitmix64(base ^ fnv1a64(tag));
}

// Deterministic generator with hand-rolled bounded-int and unit-interval
// draws. Standard-library distributions are implementation-defined, which
// would break the reproducibility contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below: n must be positive");
    std::uint64_t x, r;
    do {
      x = next();
      r = x % n;
    } while (x - r > std::uint64_t(0) - n);
    return r;
  }

  // Inclusive range.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw UsageError("Rng::range: lo > hi");
    return lo + below(hi - lo + 1);
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  // Fisher-Yates, high index down.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First n entries of a partial shuffle; order is the sampled order.
  template <class T>
  std::vector<T> sample(const std::vector<T>& v, std::size_t n) {
    std::vector<T> work = v;
    if (n >= work.size()) {
      shuffle(work);
      return work;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(work.size() - i));
      std::swap(work[i], work[j]);
    }
    work.resize(n);
    return work;
  }

 private:
  std::uint64_t state_;
};

}  // namespace retsel
