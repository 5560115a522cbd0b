#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace tcs {

// Counter-based random streams. Every draw is a pure function of
// (stream key, counter), so parallel consumers stay deterministic and
// adding a consumer does not perturb the draws of another stream.

inline uint64_t mix_bits(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive the key of a named sub-stream from the scenario seed.
inline uint64_t stream_seed(uint64_t seed, std::string_view name) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_bits(seed ^ h);
}

/// Uniform in [0, 1) from (key, counter).
inline double uniform_at(uint64_t key, uint64_t counter) {
  const uint64_t v = mix_bits(key ^ mix_bits(counter));
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

/// Standard normal draw from (key, counter), Box-Muller.
inline double gaussian_at(uint64_t key, uint64_t counter) {
  const double u1 = 1.0 - uniform_at(key, 2 * counter);      // (0, 1]
  const double u2 = uniform_at(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Stateful view over a counter-based stream, for sequential consumers.
class RngStream {
 public:
  RngStream() = default;
  RngStream(uint64_t seed, std::string_view name) : key_(stream_seed(seed, name)) {}

  double uniform() { return uniform_at(key_, counter_++); }
  double gaussian(double stddev = 1.0) { return gaussian_at(key_, counter_++) * stddev; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Skip `n` counters (used after a batch of counter-indexed draws).
  void advance(uint64_t n) { counter_ += n; }

  uint64_t key() const { return key_; }
  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_{0};
  uint64_t counter_{0};
};

}  // namespace tcs
