#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace fluxbench {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combine a hash state with one more value.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

/// FNV-1a over a label, so streams can be tagged by purpose ("ffs", "split", ...).
std::uint64_t hash_label(std::string_view label);

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
/// the standard); all distributions are implemented here because the standard
/// library's distribution objects are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in (0, 1].
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  /// Uniform integer in [0, n); rejection sampling, exact.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; consumes exactly two uniforms per draw.
  double normal();

  /// N(mean, sd^2)
  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// In-place Fisher-Yates shuffle (deterministic across platforms).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives the seed for a child stream from a parent seed plus tags. Streams
/// derived with distinct tag paths are independent regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a,
                          std::uint64_t b);

/// Shuffled index vector 0..n-1 for a given seed.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace fluxbench
