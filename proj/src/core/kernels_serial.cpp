#include <cmath>
#include <stdexcept>

#include "kernels_detail.hpp"

namespace ddikit::core::kernels {

using detail::apply_binary;
using detail::apply_unary;
using detail::kReduceBlock;

void gemm_serial(const Scalar* a, const Scalar* b, Scalar* c, std::int64_t m, std::int64_t k,
                 std::int64_t n, bool ta, bool tb) {
  // op(A) is m x k, op(B) is k x n. Strides follow from the stored layout.
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      Scalar acc = 0.0;
      for (std::int64_t p = 0; p < k; ++p) {
        const Scalar av = ta ? a[p * m + i] : a[i * k + p];
        const Scalar bv = tb ? b[j * k + p] : b[p * n + j];
        acc += av * bv;
      }
      c[i * n + j] = acc;
    }
  }
}

void unary_map_serial(Unary op, const Scalar* x, Scalar* out, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) out[i] = apply_unary(op, x[i]);
}

void binary_map_serial(Binary op, const Scalar* a, const Scalar* b, Scalar* out, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) out[i] = apply_binary(op, a[i], b[i]);
}

void affine_map_serial(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha, Scalar beta) {
  for (std::int64_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta;
}

void axpy_serial(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha) {
  for (std::int64_t i = 0; i < n; ++i) out[i] += alpha * x[i];
}

Scalar reduce_sum_serial(const Scalar* x, std::int64_t n) {
  // Same fixed block structure as the parallel variant so results match
  // bit-for-bit.
  Scalar total = 0.0;
  for (std::int64_t blk = 0; blk < n; blk += kReduceBlock) {
    const std::int64_t end = std::min(blk + kReduceBlock, n);
    Scalar part = 0.0;
    for (std::int64_t i = blk; i < end; ++i) part += x[i];
    total += part;
  }
  return total;
}

void row_sum_serial(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
  for (std::int64_t r = 0; r < rows; ++r) {
    Scalar acc = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) acc += x[r * cols + c];
    out[r] = acc;
  }
}

void col_sum_serial(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
  for (std::int64_t c = 0; c < cols; ++c) {
    Scalar acc = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) acc += x[r * cols + c];
    out[c] = acc;
  }
}

void softmax_rows_serial(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
  for (std::int64_t r = 0; r < rows; ++r) {
    const Scalar* row = x + r * cols;
    Scalar mx = row[0];
    for (std::int64_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
    Scalar denom = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) {
      const Scalar e = std::exp(row[c] - mx);
      out[r * cols + c] = e;
      denom += e;
    }
    for (std::int64_t c = 0; c < cols; ++c) out[r * cols + c] /= denom;
  }
}

void gather_rows_serial(const Scalar* x, const std::int64_t* index, Scalar* out, std::int64_t n_out,
                        std::int64_t cols) {
  for (std::int64_t r = 0; r < n_out; ++r) {
    const Scalar* src = x + index[r] * cols;
    Scalar* dst = out + r * cols;
    for (std::int64_t c = 0; c < cols; ++c) dst[c] = src[c];
  }
}

RowBuckets build_row_buckets(const std::int64_t* index, std::int64_t n_in, std::int64_t n_out) {
  RowBuckets b;
  b.offsets.assign(static_cast<std::size_t>(n_out) + 1, 0);
  for (std::int64_t i = 0; i < n_in; ++i) {
    if (index[i] < 0 || index[i] >= n_out)
      throw std::invalid_argument("scatter index out of range");
    ++b.offsets[static_cast<std::size_t>(index[i]) + 1];
  }
  for (std::size_t i = 1; i < b.offsets.size(); ++i) b.offsets[i] += b.offsets[i - 1];
  b.items.resize(static_cast<std::size_t>(n_in));
  std::vector<std::int64_t> cursor(b.offsets.begin(), b.offsets.end() - 1);
  for (std::int64_t i = 0; i < n_in; ++i) {
    b.items[static_cast<std::size_t>(cursor[static_cast<std::size_t>(index[i])]++)] = i;
  }
  return b;
}

void scatter_sum_rows_serial(const Scalar* x, const RowBuckets& buckets, Scalar* out,
                             std::int64_t n_out, std::int64_t cols) {
  for (std::int64_t r = 0; r < n_out; ++r) {
    Scalar* dst = out + r * cols;
    for (std::int64_t c = 0; c < cols; ++c) dst[c] = 0.0;
    for (std::int64_t k = buckets.offsets[r]; k < buckets.offsets[r + 1]; ++k) {
      const Scalar* src = x + buckets.items[static_cast<std::size_t>(k)] * cols;
      for (std::int64_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  }
}

void segment_softmax_serial(const Scalar* scores, const RowBuckets& buckets, Scalar* out,
                            std::int64_t n_segments) {
  for (std::int64_t s = 0; s < n_segments; ++s) {
    const std::int64_t lo = buckets.offsets[s];
    const std::int64_t hi = buckets.offsets[s + 1];
    if (lo == hi) continue;
    Scalar mx = scores[buckets.items[static_cast<std::size_t>(lo)]];
    for (std::int64_t k = lo + 1; k < hi; ++k)
      mx = std::max(mx, scores[buckets.items[static_cast<std::size_t>(k)]]);
    Scalar denom = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) {
      const std::int64_t i = buckets.items[static_cast<std::size_t>(k)];
      const Scalar e = std::exp(scores[i] - mx);
      out[i] = e;
      denom += e;
    }
    for (std::int64_t k = lo; k < hi; ++k) {
      const std::int64_t i = buckets.items[static_cast<std::size_t>(k)];
      out[i] /= denom;
    }
  }
}

void col_moments_serial(const Scalar* x, Scalar* mean, Scalar* var, std::int64_t rows,
                        std::int64_t cols) {
  for (std::int64_t c = 0; c < cols; ++c) {
    Scalar acc = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) acc += x[r * cols + c];
    const Scalar mu = acc / static_cast<Scalar>(rows);
    Scalar sq = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) {
      const Scalar d = x[r * cols + c] - mu;
      sq += d * d;
    }
    mean[c] = mu;
    var[c] = sq / static_cast<Scalar>(rows);
  }
}

}  // namespace ddikit::core::kernels
