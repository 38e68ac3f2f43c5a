#pragma once

#include <cstdint>
#include <vector>

namespace ddikit::core {

/// Deterministic pseudo-random stream (splitmix64 core).
///
/// Every draw is a pure function of the seed and the draw counter, so a
/// stream is reproducible bit-for-bit across runs and independent of how
/// work is batched. Gaussian draws use Box-Muller with a one-sample cache.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n). Requires n > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

  void fill_normal(std::vector<double>& out);

  /// Fisher-Yates shuffle over indices [0, n).
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) {
    state_ = s;
    has_spare_ = false;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixes components into a derived seed; used to give every (example, scale)
/// its own noise stream so results do not depend on batch layout.
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b);
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

}  // namespace ddikit::core
