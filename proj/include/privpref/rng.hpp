#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace privpref {

// splitmix64 finalizer.
constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable stream derivation: every randomized component draws from a seed
// obtained as derive_seed(master, "component", {coords...}). This keeps
// results independent of scheduling and of the standard library.
inline uint64_t derive_seed(uint64_t master, std::string_view tag,
                            std::initializer_list<uint64_t> coords = {}) {
  uint64_t h = mix64(master ^ fnv1a64(tag));
  for (uint64_t c : coords) h = mix64(h ^ c);
  return h;
}

// splitmix64 sequence generator. All randomness in the library flows through
// this engine; std::random distributions are avoided on purpose since their
// output is implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // [0, n); n > 0. Bias of the multiply-shift method is < n / 2^64.
  uint64_t uniform_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller, one variate per call (two uniforms consumed each call so the
  // stream position does not depend on caller history).
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Laplace(0, scale) via inverse CDF.
  double laplace(double scale) {
    double u = uniform() - 0.5;
    double sign = u < 0.0 ? -1.0 : 1.0;
    return -scale * sign * std::log(1.0 - 2.0 * std::fabs(u));
  }

  // Index into a non-negative weight vector; weights need not be normalized.
  size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (x < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  // Fisher-Yates; deterministic given the engine state.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace privpref
