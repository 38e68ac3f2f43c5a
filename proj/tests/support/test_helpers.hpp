#pragma once

#include <cmath>
#include <vector>

#include "ddikit/core/random.hpp"
#include "ddikit/core/tensor.hpp"

namespace ddikit::testing {

inline core::Tensor random_tensor(core::RandomStream& rng, core::Shape shape, double lo = -1.0,
                                  double hi = 1.0, bool requires_grad = true) {
  std::vector<double> vals(static_cast<std::size_t>(core::shape_size(shape)));
  for (double& v : vals) v = rng.uniform(lo, hi);
  return core::Tensor::from_values(std::move(shape), std::move(vals), requires_grad);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool bit_equal(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace ddikit::testing
