#include "ddikit/core/random.hpp"

#include <cmath>
#include <numbers>

namespace ddikit::core {

std::uint64_t RandomStream::uniform_int(std::uint64_t n) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 shifted away from zero so log() stays finite.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

void RandomStream::fill_normal(std::vector<double>& out) {
  for (double& v : out) v = normal();
}

std::vector<std::size_t> RandomStream::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_int(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  RandomStream s(a ^ (b * 0x9e3779b97f4a7c15ULL + 0x100000001b3ULL));
  return s.next_u64();
}

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return seed_mix(seed_mix(a, b), c);
}

std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return seed_mix(seed_mix(a, b, c), d);
}

}  // namespace ddikit::core
