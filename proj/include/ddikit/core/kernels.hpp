#pragma once

#include <cstdint>
#include <vector>

namespace ddikit::core::kernels {

using Scalar = double;

/// Kernels come in two flavours: a plain serial reference and an OpenMP
/// variant. Both produce bit-identical output because parallelism is only
/// over independent output elements and every reduction runs in a fixed
/// order (full-array sums use fixed 4096-element blocks combined in block
/// order). The dispatching entry points below pick the OpenMP variant when
/// it is enabled and the problem is large enough to pay for thread startup.

bool parallel_enabled();
void set_parallel_enabled(bool on);

enum class Unary { Sigmoid, Tanh, Exp, Log, Square };
enum class Binary { Add, Sub, Mul };

// C[m x n] = op(A) * op(B), row-major; ta/tb transpose the logical operand.
void gemm(const Scalar* a, const Scalar* b, Scalar* c, std::int64_t m, std::int64_t k,
          std::int64_t n, bool ta, bool tb);
void gemm_serial(const Scalar* a, const Scalar* b, Scalar* c, std::int64_t m, std::int64_t k,
                 std::int64_t n, bool ta, bool tb);
void gemm_omp(const Scalar* a, const Scalar* b, Scalar* c, std::int64_t m, std::int64_t k,
              std::int64_t n, bool ta, bool tb);

void unary_map(Unary op, const Scalar* x, Scalar* out, std::int64_t n);
void unary_map_serial(Unary op, const Scalar* x, Scalar* out, std::int64_t n);
void unary_map_omp(Unary op, const Scalar* x, Scalar* out, std::int64_t n);

void binary_map(Binary op, const Scalar* a, const Scalar* b, Scalar* out, std::int64_t n);
void binary_map_serial(Binary op, const Scalar* a, const Scalar* b, Scalar* out, std::int64_t n);
void binary_map_omp(Binary op, const Scalar* a, const Scalar* b, Scalar* out, std::int64_t n);

// out = alpha * x + beta
void affine_map(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha, Scalar beta);
void affine_map_serial(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha, Scalar beta);
void affine_map_omp(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha, Scalar beta);

// out += alpha * x  (gradient accumulation)
void axpy(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha);
void axpy_serial(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha);
void axpy_omp(const Scalar* x, Scalar* out, std::int64_t n, Scalar alpha);

// Blocked deterministic full reduction.
Scalar reduce_sum(const Scalar* x, std::int64_t n);
Scalar reduce_sum_serial(const Scalar* x, std::int64_t n);
Scalar reduce_sum_omp(const Scalar* x, std::int64_t n);

// Per-row / per-column sums of a [rows x cols] row-major matrix.
void row_sum(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);
void row_sum_serial(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);
void row_sum_omp(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);

void col_sum(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);
void col_sum_serial(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);
void col_sum_omp(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);

// Row-wise softmax of a [rows x cols] matrix (max-shifted).
void softmax_rows(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);
void softmax_rows_serial(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);
void softmax_rows_omp(const Scalar* x, Scalar* out, std::int64_t rows, std::int64_t cols);

void gather_rows(const Scalar* x, const std::int64_t* index, Scalar* out, std::int64_t n_out,
                 std::int64_t cols);
void gather_rows_serial(const Scalar* x, const std::int64_t* index, Scalar* out, std::int64_t n_out,
                        std::int64_t cols);
void gather_rows_omp(const Scalar* x, const std::int64_t* index, Scalar* out, std::int64_t n_out,
                     std::int64_t cols);

/// CSR-style buckets mapping each output row to its source rows in stable
/// input order; shared by scatter-sum and segment-softmax so that serial and
/// parallel paths accumulate in the same order.
struct RowBuckets {
  std::vector<std::int64_t> offsets;  // size n_out + 1
  std::vector<std::int64_t> items;    // source row ids, stable within bucket
};
RowBuckets build_row_buckets(const std::int64_t* index, std::int64_t n_in, std::int64_t n_out);

void scatter_sum_rows(const Scalar* x, const RowBuckets& buckets, Scalar* out, std::int64_t n_out,
                      std::int64_t cols);
void scatter_sum_rows_serial(const Scalar* x, const RowBuckets& buckets, Scalar* out,
                             std::int64_t n_out, std::int64_t cols);
void scatter_sum_rows_omp(const Scalar* x, const RowBuckets& buckets, Scalar* out,
                          std::int64_t n_out, std::int64_t cols);

// Softmax over bucketed groups of a length-n score vector.
void segment_softmax(const Scalar* scores, const RowBuckets& buckets, Scalar* out,
                     std::int64_t n_segments);
void segment_softmax_serial(const Scalar* scores, const RowBuckets& buckets, Scalar* out,
                            std::int64_t n_segments);
void segment_softmax_omp(const Scalar* scores, const RowBuckets& buckets, Scalar* out,
                         std::int64_t n_segments);

// Per-column mean and biased variance of a [rows x cols] matrix.
void col_moments(const Scalar* x, Scalar* mean, Scalar* var, std::int64_t rows, std::int64_t cols);
void col_moments_serial(const Scalar* x, Scalar* mean, Scalar* var, std::int64_t rows,
                        std::int64_t cols);
void col_moments_omp(const Scalar* x, Scalar* mean, Scalar* var, std::int64_t rows,
                     std::int64_t cols);

}  // namespace ddikit::core::kernels
