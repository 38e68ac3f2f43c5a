#pragma once

#include <cstdint>
#include <vector>

#include "ddikit/core/tensor.hpp"

namespace ddikit::core {

/// Differentiable primitives. All tensors are 2-d row-major unless noted.
/// Shape violations throw std::invalid_argument naming the operation and the
/// offending shapes. Every primitive has an exact analytic adjoint; gradients
/// accumulate additively into parents, so reusing a tensor in several
/// branches sums the per-branch contributions.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, Scalar c);
Tensor add_scalar(const Tensor& a, Scalar c);

Tensor sigmoid(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor exp_op(const Tensor& a);
Tensor log_op(const Tensor& a);
Tensor square(const Tensor& a);

/// Parametric rectifier; slope is a one-element learnable tensor.
Tensor prelu(const Tensor& a, const Tensor& slope);

/// Pass-through gradient inside [lo, hi], zero outside.
Tensor clamp(const Tensor& a, Scalar lo, Scalar hi);

/// Softmax along axis (0 = down columns, 1 = along rows) of a 2-d tensor.
Tensor softmax(const Tensor& a, int axis);

/// Softmax of a [n x 1] score vector within each segment. Segments with no
/// members are permitted and produce no output entries.
Tensor segment_softmax(const Tensor& scores, const std::vector<std::int64_t>& segment_of,
                       std::int64_t n_segments);

Tensor concat(const Tensor& a, const Tensor& b, int axis);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

Tensor gather_rows(const Tensor& a, const std::vector<std::int64_t>& index);
Tensor scatter_sum(const Tensor& a, const std::vector<std::int64_t>& index, std::int64_t n_rows);

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor sum_axis(const Tensor& a, int axis);
Tensor mean_axis(const Tensor& a, int axis);

/// x [n x d] + b [1 x d], broadcast over rows (bias add).
Tensor add_rowvec(const Tensor& x, const Tensor& b);
/// x [n x d] scaled per row by a [n x 1].
Tensor mul_colvec(const Tensor& x, const Tensor& a);

/// Mean binary cross-entropy with logits, computed in the stable form
/// max(mu,0) - y*mu + log(1 + exp(-|mu|)). y must hold {0,1} constants.
Tensor bce_with_logits_mean(const Tensor& mu, const Tensor& y);

/// Running statistics owned by a batch-norm layer (not part of the record).
struct BatchNormStats {
  std::vector<Scalar> running_mean;
  std::vector<Scalar> running_var;

  explicit BatchNormStats(std::int64_t dim = 0)
      : running_mean(static_cast<std::size_t>(dim), 0.0),
        running_var(static_cast<std::size_t>(dim), 1.0) {}
};

/// Column-wise batch normalization of x [n x d] with learnable gamma/beta
/// [1 x d]. Training mode normalizes by batch statistics and, when
/// update_running is set, folds them into stats with the given momentum;
/// eval mode normalizes by the running statistics.
Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormStats& stats,
                 bool training, bool update_running, Scalar momentum = 0.1, Scalar eps = 1e-5);

}  // namespace ddikit::core
