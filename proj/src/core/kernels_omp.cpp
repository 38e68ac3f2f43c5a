#include <atomic>
#include <cmath>

#include "kernels_detail.hpp"

namespace ddikit::core::kernels {

using detail::apply_binary;
using detail::apply_unary;
using detail::kReduceBlock;

namespace {

std::atomic<bool> g_parallel{true};

// Below these sizes thread startup costs more than the loop body.
constexpr std::int64_t kElemwiseCutoff = 16384;
constexpr std::int64_t kRowCutoff = 64;

inline bool use_omp(std::int64_t work) { return g_parallel.load(std::memory_order_relaxed) && work >= kElemwiseCutoff; }
inline bool use_omp_rows(std::int64_t rows, std::int64_t cols) {
  return g_parallel.load(std::memory_order_relaxed) && rows >= kRowCutoff && rows * cols >= kElemwiseCutoff;
}

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel_enabled(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void gemm_omp(const Scalar* a, const Scalar* b, Scalar* c, std::int64_t m, std::int64_t k,
              std::int64_t n, bool ta, bool tb) {
#pragma omp parallel for schedule(static)
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

void gemm(const Scalar* a, const Scalar* b, Scalar* c, std::int64_t m, std::int64_t k,
          std::int64_t n, bool ta, bool tb) {
  if (use_omp_rows(m, k * n)) {
    gemm_omp(a, b, c, m, k, n, ta, tb);
  } else {
    gemm_serial(a, b, c, m, k, n, ta, tb);
  }
}

void unary_map_omp(Unary op, const Scalar* x, Scalar* out, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = apply_unary(op, x[i]);
}

void unary_map(Unary op, const Scalar* x, Scalar* out, std::int64_t n) {
  if (use_omp(n)) {
    unary_map_omp(op, x, out, n);
  } else {
    unary_map_serial(op, x, out, n);
  }
}

void binary_map_omp(Binary op, const Scalar* a, const Scalar* b, Scalar* out, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = apply_binary(op, a[i], b[i]);
}

void binary_map(Binary op, const Scalar* a, const Scalar* b, Scalar* out, std::int64_t n) {
  if (use_omp(n)) {
    binary_map_omp(op, a, b, out, n);
  } else {
    binary_map_serial(op, a, b, out, n);
  }
}

void affine_map_omp(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha, Scalar beta) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta;
}

void affine_map(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha, Scalar beta) {
  if (use_omp(n)) {
    affine_map_omp(x, out, n, alpha, beta);
  } else {
    affine_map_serial(x, out, n, alpha, beta);
  }
}

void axpy_omp(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] += alpha * x[i];
}

void axpy(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha) {
  if (use_omp(n)) {
    axpy_omp(x, out, n, alpha);
  } else {
    axpy_serial(x, out, n, alpha);
  }
}

Scalar reduce_sum_omp(const Scalar* x, std::int64_t n) {
  const std::int64_t n_blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<Scalar> parts(static_cast<std::size_t>(n_blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t blk = 0; blk < n_blocks; ++blk) {
    const std::int64_t lo = blk * kReduceBlock;
    const std::int64_t hi = std::min(lo + kReduceBlock, n);
    Scalar part = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) part += x[i];
    parts[static_cast<std::size_t>(blk)] = part;
  }
  Scalar total = 0.0;
  for (Scalar p : parts) total += p;
  return total;
}

Scalar reduce_sum(const Scalar* x, std::int64_t n) {
  return use_omp(n) ? reduce_sum_omp(x, n) : reduce_sum_serial(x, n);
}

void row_sum_omp(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    Scalar acc = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) acc += x[r * cols + c];
    out[r] = acc;
  }
}

void row_sum(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
  if (use_omp_rows(rows, cols)) {
    row_sum_omp(x, out, rows, cols);
  } else {
    row_sum_serial(x, out, rows, cols);
  }
}

void col_sum_omp(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < cols; ++c) {
    Scalar acc = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) acc += x[r * cols + c];
    out[c] = acc;
  }
}

void col_sum(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
  if (use_omp_rows(cols, rows)) {
    col_sum_omp(x, out, rows, cols);
  } else {
    col_sum_serial(x, out, rows, cols);
  }
}

void softmax_rows_omp(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
#pragma omp parallel for schedule(static)
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

void softmax_rows(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols) {
  if (use_omp_rows(rows, cols)) {
    softmax_rows_omp(x, out, rows, cols);
  } else {
    softmax_rows_serial(x, out, rows, cols);
  }
}

void gather_rows_omp(const Scalar* x, const std::int64_t* index, Scalar* out, std::int64_t n_out,
                     std::int64_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n_out; ++r) {
    const Scalar* src = x + index[r] * cols;
    Scalar* dst = out + r * cols;
    for (std::int64_t c = 0; c < cols; ++c) dst[c] = src[c];
  }
}

void gather_rows(const Scalar* x, const std::int64_t* index, Scalar* out, std::int64_t n_out,
                 std::int64_t cols) {
  if (use_omp_rows(n_out, cols)) {
    gather_rows_omp(x, index, out, n_out, cols);
  } else {
    gather_rows_serial(x, index, out, n_out, cols);
  }
}

void scatter_sum_rows_omp(const Scalar* x, const RowBuckets& buckets, Scalar* out,
                          std::int64_t n_out, std::int64_t cols) {
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n_out; ++r) {
    Scalar* dst = out + r * cols;
    for (std::int64_t c = 0; c < cols; ++c) dst[c] = 0.0;
    for (std::int64_t k = buckets.offsets[r]; k < buckets.offsets[r + 1]; ++k) {
      const Scalar* src = x + buckets.items[static_cast<std::size_t>(k)] * cols;
      for (std::int64_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  }
}

void scatter_sum_rows(const Scalar* x, const RowBuckets& buckets, Scalar* out, std::int64_t n_out,
                      std::int64_t cols) {
  if (use_omp_rows(n_out, cols)) {
    scatter_sum_rows_omp(x, buckets, out, n_out, cols);
  } else {
    scatter_sum_rows_serial(x, buckets, out, n_out, cols);
  }
}

void segment_softmax_omp(const Scalar* scores, const RowBuckets& buckets, Scalar* out,
                         std::int64_t n_segments) {
#pragma omp parallel for schedule(static)
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

void segment_softmax(const Scalar* scores, const RowBuckets& buckets, Scalar* out,
                     std::int64_t n_segments) {
  if (g_parallel.load(std::memory_order_relaxed) && n_segments >= kRowCutoff) {
    segment_softmax_omp(scores, buckets, out, n_segments);
  } else {
    segment_softmax_serial(scores, buckets, out, n_segments);
  }
}

void col_moments_omp(const Scalar* x, Scalar* mean, Scalar* var, std::int64_t rows,
                     std::int64_t cols) {
#pragma omp parallel for schedule(static)
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

void col_moments(const Scalar* x, Scalar* mean, Scalar* var, std::int64_t rows, std::int64_t cols) {
  if (use_omp_rows(cols, rows)) {
    col_moments_omp(x, mean, var, rows, cols);
  } else {
    col_moments_serial(x, mean, var, rows, cols);
  }
}

}  // namespace ddikit::core::kernels
