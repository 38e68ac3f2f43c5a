#pragma once

#include <algorithm>
#include <cmath>

#include "ddikit/core/kernels.hpp"

namespace ddikit::core::kernels::detail {

constexpr std::int64_t kReduceBlock = 4096;

inline Scalar apply_unary(Unary op, Scalar v) {
  switch (op) {
    case Unary::Sigmoid:
      // Branch keeps exp() off the overflowing side.
      return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    case Unary::Tanh:
      return std::tanh(v);
    case Unary::Exp:
      return std::exp(v);
    case Unary::Log:
      return std::log(v);
    case Unary::Square:
      return v * v;
  }
  return 0.0;
}

inline Scalar apply_binary(Binary op, Scalar a, Scalar b) {
  switch (op) {
    case Binary::Add:
      return a + b;
    case Binary::Sub:
      return a - b;
    case Binary::Mul:
      return a * b;
  }
  return 0.0;
}

}  // namespace ddikit::core::kernels::detail
