#include "ddikit/core/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ddikit/core/kernels.hpp"

namespace ddikit::core {

namespace {

namespace kn = kernels;

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) +
                              " and " + shape_str(b.shape()));
}

void require_2d(const char* op, const Tensor& t) {
  if (t.shape().size() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected a 2-d tensor, got " +
                                shape_str(t.shape()));
  }
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error(op, a, b);
}

// Accumulates alpha * src into the grad buffer of parent when it needs one.
void accumulate(const std::shared_ptr<TensorNode>& parent, const Scalar* src, Scalar alpha = 1.0) {
  if (!parent->requires_grad) return;
  auto& g = parent->ensure_grad();
  kn::axpy(src, g.data(), static_cast<std::int64_t>(g.size()), alpha);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d("matmul", a);
  require_2d("matmul", b);
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const std::int64_t m = a.rows(), k = a.cols(), n = b.cols();
  auto pa = a.node_ptr();
  auto pb = b.node_ptr();
  Tensor out = make_node({m, n}, {a, b}, [pa, pb, m, k, n](TensorNode& self) {
    if (pa->requires_grad) {
      std::vector<Scalar> tmp(static_cast<std::size_t>(m * k));
      kn::gemm(self.grad.data(), pb->values.data(), tmp.data(), m, n, k, false, true);
      accumulate(pa, tmp.data());
    }
    if (pb->requires_grad) {
      std::vector<Scalar> tmp(static_cast<std::size_t>(k * n));
      kn::gemm(pa->values.data(), self.grad.data(), tmp.data(), k, m, n, true, false);
      accumulate(pb, tmp.data());
    }
  });
  kn::gemm(a.values().data(), b.values().data(), out.node()->values.data(), m, k, n, false, false);
  return out;
}

namespace {

Tensor elementwise_binary(const char* name, kn::Binary op, const Tensor& a, const Tensor& b) {
  require_same_shape(name, a, b);
  auto pa = a.node_ptr();
  auto pb = b.node_ptr();
  Tensor out = make_node(a.shape(), {a, b}, [pa, pb, op](TensorNode& self) {
    const std::int64_t n = self.size();
    switch (op) {
      case kn::Binary::Add:
        accumulate(pa, self.grad.data());
        accumulate(pb, self.grad.data());
        break;
      case kn::Binary::Sub:
        accumulate(pa, self.grad.data());
        accumulate(pb, self.grad.data(), -1.0);
        break;
      case kn::Binary::Mul: {
        std::vector<Scalar> tmp(static_cast<std::size_t>(n));
        if (pa->requires_grad) {
          kn::binary_map(kn::Binary::Mul, self.grad.data(), pb->values.data(), tmp.data(), n);
          accumulate(pa, tmp.data());
        }
        if (pb->requires_grad) {
          kn::binary_map(kn::Binary::Mul, self.grad.data(), pa->values.data(), tmp.data(), n);
          accumulate(pb, tmp.data());
        }
        break;
      }
    }
  });
  kn::binary_map(op, a.values().data(), b.values().data(), out.node()->values.data(), a.size());
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return elementwise_binary("add", kn::Binary::Add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise_binary("sub", kn::Binary::Sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise_binary("mul", kn::Binary::Mul, a, b); }

Tensor scale(const Tensor& a, Scalar c) {
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa, c](TensorNode& self) {
    accumulate(pa, self.grad.data(), c);
  });
  kn::affine_map(a.values().data(), out.node()->values.data(), a.size(), c, 0.0);
  return out;
}

Tensor add_scalar(const Tensor& a, Scalar c) {
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa](TensorNode& self) {
    accumulate(pa, self.grad.data());
  });
  kn::affine_map(a.values().data(), out.node()->values.data(), a.size(), 1.0, c);
  return out;
}

namespace {

// dy/dx expressed from the forward output y (unary ops below except log and
// square, whose derivative reads the input instead).
Tensor unary_from_output(const char* /*name*/, kn::Unary op, const Tensor& a,
                         Scalar (*dfn)(Scalar y)) {
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa, dfn](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * dfn(self.values[i]);
  });
  kn::unary_map(op, a.values().data(), out.node()->values.data(), a.size());
  return out;
}

}  // namespace

Tensor sigmoid(const Tensor& a) {
  return unary_from_output("sigmoid", kn::Unary::Sigmoid, a,
                           +[](Scalar y) { return y * (1.0 - y); });
}

Tensor tanh_op(const Tensor& a) {
  return unary_from_output("tanh", kn::Unary::Tanh, a, +[](Scalar y) { return 1.0 - y * y; });
}

Tensor exp_op(const Tensor& a) {
  return unary_from_output("exp", kn::Unary::Exp, a, +[](Scalar y) { return y; });
}

Tensor log_op(const Tensor& a) {
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / pa->values[i];
  });
  kn::unary_map(kn::Unary::Log, a.values().data(), out.node()->values.data(), a.size());
  return out;
}

Tensor square(const Tensor& a) {
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * 2.0 * pa->values[i];
  });
  kn::unary_map(kn::Unary::Square, a.values().data(), out.node()->values.data(), a.size());
  return out;
}

Tensor prelu(const Tensor& a, const Tensor& slope) {
  if (slope.size() != 1) {
    throw std::invalid_argument("prelu: slope must be a one-element tensor, got " +
                                shape_str(slope.shape()));
  }
  auto pa = a.node_ptr();
  auto ps = slope.node_ptr();
  Tensor out = make_node(a.shape(), {a, slope}, [pa, ps](TensorNode& self) {
    const Scalar alpha = ps->values[0];
    if (pa->requires_grad) {
      auto& g = pa->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] += self.grad[i] * (pa->values[i] >= 0.0 ? 1.0 : alpha);
      }
    }
    if (ps->requires_grad) {
      Scalar acc = 0.0;
      for (std::size_t i = 0; i < pa->values.size(); ++i) {
        if (pa->values[i] < 0.0) acc += self.grad[i] * pa->values[i];
      }
      ps->ensure_grad()[0] += acc;
    }
  });
  const Scalar alpha = slope.values()[0];
  const Scalar* x = a.values().data();
  Scalar* y = out.node()->values.data();
  for (std::int64_t i = 0; i < a.size(); ++i) y[i] = x[i] >= 0.0 ? x[i] : alpha * x[i];
  return out;
}

Tensor clamp(const Tensor& a, Scalar lo, Scalar hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa, lo, hi](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Scalar x = pa->values[i];
      if (x >= lo && x <= hi) g[i] += self.grad[i];
    }
  });
  const Scalar* x = a.values().data();
  Scalar* y = out.node()->values.data();
  for (std::int64_t i = 0; i < a.size(); ++i) y[i] = std::min(std::max(x[i], lo), hi);
  return out;
}

Tensor softmax(const Tensor& a, int axis) {
  require_2d("softmax", a);
  if (axis != 0 && axis != 1) throw std::invalid_argument("softmax: axis must be 0 or 1");
  const std::int64_t reduced = axis == 1 ? a.cols() : a.rows();
  if (reduced == 0) {
    throw std::invalid_argument("softmax: reduced axis is empty, shape " + shape_str(a.shape()));
  }
  if (axis == 0) {
    // Softmax down columns via the row kernel on the transpose.
    return transpose(softmax(transpose(a), 1));
  }
  const std::int64_t rows = a.rows(), cols = a.cols();
  auto pa = a.node_ptr();
  Tensor out = make_node(a.shape(), {a}, [pa, rows, cols](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::int64_t r = 0; r < rows; ++r) {
      const Scalar* y = self.values.data() + r * cols;
      const Scalar* gy = self.grad.data() + r * cols;
      Scalar dot = 0.0;
      for (std::int64_t c = 0; c < cols; ++c) dot += gy[c] * y[c];
      for (std::int64_t c = 0; c < cols; ++c) g[r * cols + c] += y[c] * (gy[c] - dot);
    }
  });
  kn::softmax_rows(a.values().data(), out.node()->values.data(), rows, cols);
  return out;
}

Tensor segment_softmax(const Tensor& scores, const std::vector<std::int64_t>& segment_of,
                       std::int64_t n_segments) {
  require_2d("segment_softmax", scores);
  if (scores.cols() != 1) {
    throw std::invalid_argument("segment_softmax: scores must be [n x 1], got " +
                                shape_str(scores.shape()));
  }
  if (static_cast<std::int64_t>(segment_of.size()) != scores.rows()) {
    throw std::invalid_argument("segment_softmax: one segment id per score required");
  }
  auto buckets = kn::build_row_buckets(segment_of.data(),
                                       static_cast<std::int64_t>(segment_of.size()), n_segments);
  auto pa = scores.node_ptr();
  Tensor out = make_node(scores.shape(), {scores}, [pa, buckets, n_segments](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::int64_t s = 0; s < n_segments; ++s) {
      Scalar dot = 0.0;
      for (std::int64_t k = buckets.offsets[s]; k < buckets.offsets[s + 1]; ++k) {
        const std::int64_t i = buckets.items[static_cast<std::size_t>(k)];
        dot += self.grad[i] * self.values[i];
      }
      for (std::int64_t k = buckets.offsets[s]; k < buckets.offsets[s + 1]; ++k) {
        const std::int64_t i = buckets.items[static_cast<std::size_t>(k)];
        g[i] += self.values[i] * (self.grad[i] - dot);
      }
    }
  });
  kn::segment_softmax(scores.values().data(), buckets, out.node()->values.data(), n_segments);
  return out;
}

Tensor concat(const Tensor& a, const Tensor& b, int axis) {
  require_2d("concat", a);
  require_2d("concat", b);
  if (axis != 0 && axis != 1) throw std::invalid_argument("concat: axis must be 0 or 1");
  if ((axis == 0 && a.cols() != b.cols()) || (axis == 1 && a.rows() != b.rows())) {
    shape_error("concat", a, b);
  }
  const std::int64_t rows = axis == 0 ? a.rows() + b.rows() : a.rows();
  const std::int64_t cols = axis == 1 ? a.cols() + b.cols() : a.cols();
  auto pa = a.node_ptr();
  auto pb = b.node_ptr();
  const std::int64_t ar = a.rows(), ac = a.cols(), bc = b.cols();
  Tensor out = make_node({rows, cols}, {a, b}, [pa, pb, axis, ar, ac, bc, cols](TensorNode& self) {
    if (axis == 0) {
      if (pa->requires_grad) accumulate(pa, self.grad.data());
      if (pb->requires_grad) accumulate(pb, self.grad.data() + ar * ac);
    } else {
      const std::int64_t rows_out = self.shape[0];
      if (pa->requires_grad) {
        auto& g = pa->ensure_grad();
        for (std::int64_t r = 0; r < rows_out; ++r)
          for (std::int64_t c = 0; c < ac; ++c) g[r * ac + c] += self.grad[r * cols + c];
      }
      if (pb->requires_grad) {
        auto& g = pb->ensure_grad();
        for (std::int64_t r = 0; r < rows_out; ++r)
          for (std::int64_t c = 0; c < bc; ++c) g[r * bc + c] += self.grad[r * cols + ac + c];
      }
    }
  });
  Scalar* dst = out.node()->values.data();
  if (axis == 0) {
    std::copy(a.values().begin(), a.values().end(), dst);
    std::copy(b.values().begin(), b.values().end(), dst + a.size());
  } else {
    for (std::int64_t r = 0; r < rows; ++r) {
      std::copy_n(a.values().data() + r * ac, ac, dst + r * cols);
      std::copy_n(b.values().data() + r * bc, bc, dst + r * cols + ac);
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  require_2d("transpose", a);
  const std::int64_t rows = a.rows(), cols = a.cols();
  auto pa = a.node_ptr();
  Tensor out = make_node({cols, rows}, {a}, [pa, rows, cols](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c) g[r * cols + c] += self.grad[c * rows + r];
  });
  const Scalar* x = a.values().data();
  Scalar* y = out.node()->values.data();
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) y[c * rows + r] = x[r * cols + c];
  return out;
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_size(shape) != a.size()) {
    throw std::invalid_argument("reshape: cannot view " + shape_str(a.shape()) + " as " +
                                shape_str(shape));
  }
  auto pa = a.node_ptr();
  Tensor out = make_node(std::move(shape), {a}, [pa](TensorNode& self) {
    accumulate(pa, self.grad.data());
  });
  std::copy(a.values().begin(), a.values().end(), out.node()->values.begin());
  return out;
}

Tensor gather_rows(const Tensor& a, const std::vector<std::int64_t>& index) {
  require_2d("gather_rows", a);
  const std::int64_t src_rows = a.rows(), cols = a.cols();
  for (std::int64_t i : index) {
    if (i < 0 || i >= src_rows) {
      throw std::invalid_argument("gather_rows: index " + std::to_string(i) +
                                  " out of range for " + shape_str(a.shape()));
    }
  }
  const std::int64_t n_out = static_cast<std::int64_t>(index.size());
  auto pa = a.node_ptr();
  Tensor out = make_node({n_out, cols}, {a}, [pa, index, src_rows, cols](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto buckets = kn::build_row_buckets(index.data(), static_cast<std::int64_t>(index.size()),
                                         src_rows);
    std::vector<Scalar> tmp(static_cast<std::size_t>(src_rows * cols));
    kn::scatter_sum_rows(self.grad.data(), buckets, tmp.data(), src_rows, cols);
    accumulate(pa, tmp.data());
  });
  kn::gather_rows(a.values().data(), index.data(), out.node()->values.data(), n_out, cols);
  return out;
}

Tensor scatter_sum(const Tensor& a, const std::vector<std::int64_t>& index, std::int64_t n_rows) {
  require_2d("scatter_sum", a);
  if (static_cast<std::int64_t>(index.size()) != a.rows()) {
    throw std::invalid_argument("scatter_sum: one target per input row required, got " +
                                std::to_string(index.size()) + " indices for " +
                                shape_str(a.shape()));
  }
  const std::int64_t cols = a.cols();
  auto buckets = kn::build_row_buckets(index.data(), static_cast<std::int64_t>(index.size()),
                                       n_rows);
  auto pa = a.node_ptr();
  Tensor out = make_node({n_rows, cols}, {a}, [pa, index, cols](TensorNode& self) {
    if (!pa->requires_grad) return;
    const std::int64_t n_in = static_cast<std::int64_t>(index.size());
    std::vector<Scalar> tmp(static_cast<std::size_t>(n_in * cols));
    kn::gather_rows(self.grad.data(), index.data(), tmp.data(), n_in, cols);
    accumulate(pa, tmp.data());
  });
  kn::scatter_sum_rows(a.values().data(), buckets, out.node()->values.data(), n_rows, cols);
  return out;
}

Tensor sum_all(const Tensor& a) {
  auto pa = a.node_ptr();
  Tensor out = make_node({1, 1}, {a}, [pa](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    const Scalar gv = self.grad[0];
    for (Scalar& v : g) v += gv;
  });
  out.node()->values[0] = kn::reduce_sum(a.values().data(), a.size());
  return out;
}

Tensor mean_all(const Tensor& a) {
  if (a.size() == 0) throw std::invalid_argument("mean_all: empty tensor");
  return scale(sum_all(a), 1.0 / static_cast<Scalar>(a.size()));
}

Tensor sum_axis(const Tensor& a, int axis) {
  require_2d("sum_axis", a);
  if (axis != 0 && axis != 1) throw std::invalid_argument("sum_axis: axis must be 0 or 1");
  const std::int64_t rows = a.rows(), cols = a.cols();
  auto pa = a.node_ptr();
  if (axis == 1) {
    Tensor out = make_node({rows, 1}, {a}, [pa, rows, cols](TensorNode& self) {
      if (!pa->requires_grad) return;
      auto& g = pa->ensure_grad();
      for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) g[r * cols + c] += self.grad[r];
    });
    kn::row_sum(a.values().data(), out.node()->values.data(), rows, cols);
    return out;
  }
  Tensor out = make_node({1, cols}, {a}, [pa, rows, cols](TensorNode& self) {
    if (!pa->requires_grad) return;
    auto& g = pa->ensure_grad();
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c) g[r * cols + c] += self.grad[c];
  });
  kn::col_sum(a.values().data(), out.node()->values.data(), rows, cols);
  return out;
}

Tensor mean_axis(const Tensor& a, int axis) {
  require_2d("mean_axis", a);
  const std::int64_t denom = axis == 1 ? a.cols() : a.rows();
  if (denom == 0) throw std::invalid_argument("mean_axis: reduced axis is empty");
  return scale(sum_axis(a, axis), 1.0 / static_cast<Scalar>(denom));
}

Tensor add_rowvec(const Tensor& x, const Tensor& b) {
  require_2d("add_rowvec", x);
  require_2d("add_rowvec", b);
  if (b.rows() != 1 || b.cols() != x.cols()) shape_error("add_rowvec", x, b);
  const std::int64_t rows = x.rows(), cols = x.cols();
  auto px = x.node_ptr();
  auto pb = b.node_ptr();
  Tensor out = make_node(x.shape(), {x, b}, [px, pb, rows, cols](TensorNode& self) {
    if (px->requires_grad) accumulate(px, self.grad.data());
    if (pb->requires_grad) {
      std::vector<Scalar> tmp(static_cast<std::size_t>(cols));
      kn::col_sum(self.grad.data(), tmp.data(), rows, cols);
      accumulate(pb, tmp.data());
    }
  });
  const Scalar* xs = x.values().data();
  const Scalar* bs = b.values().data();
  Scalar* y = out.node()->values.data();
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) y[r * cols + c] = xs[r * cols + c] + bs[c];
  return out;
}

Tensor mul_colvec(const Tensor& x, const Tensor& a) {
  require_2d("mul_colvec", x);
  require_2d("mul_colvec", a);
  if (a.cols() != 1 || a.rows() != x.rows()) shape_error("mul_colvec", x, a);
  const std::int64_t rows = x.rows(), cols = x.cols();
  auto px = x.node_ptr();
  auto pa = a.node_ptr();
  Tensor out = make_node(x.shape(), {x, a}, [px, pa, rows, cols](TensorNode& self) {
    if (px->requires_grad) {
      auto& g = px->ensure_grad();
      for (std::int64_t r = 0; r < rows; ++r) {
        const Scalar av = pa->values[static_cast<std::size_t>(r)];
        for (std::int64_t c = 0; c < cols; ++c) g[r * cols + c] += self.grad[r * cols + c] * av;
      }
    }
    if (pa->requires_grad) {
      auto& g = pa->ensure_grad();
      for (std::int64_t r = 0; r < rows; ++r) {
        Scalar acc = 0.0;
        for (std::int64_t c = 0; c < cols; ++c)
          acc += self.grad[r * cols + c] * px->values[static_cast<std::size_t>(r * cols + c)];
        g[static_cast<std::size_t>(r)] += acc;
      }
    }
  });
  const Scalar* xs = x.values().data();
  const Scalar* as = a.values().data();
  Scalar* y = out.node()->values.data();
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) y[r * cols + c] = xs[r * cols + c] * as[r];
  return out;
}

Tensor bce_with_logits_mean(const Tensor& mu, const Tensor& y) {
  require_same_shape("bce_with_logits", mu, y);
  if (y.requires_grad()) {
    throw std::invalid_argument("bce_with_logits: labels must not require gradients");
  }
  for (Scalar v : y.values()) {
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("bce_with_logits: labels must be 0 or 1");
  }
  const std::int64_t n = mu.size();
  if (n == 0) throw std::invalid_argument("bce_with_logits: empty batch");
  auto pm = mu.node_ptr();
  auto py = y.node_ptr();
  Tensor out = make_node({1, 1}, {mu, y}, [pm, py, n](TensorNode& self) {
    if (!pm->requires_grad) return;
    auto& g = pm->ensure_grad();
    const Scalar gv = self.grad[0] / static_cast<Scalar>(n);
    for (std::int64_t i = 0; i < n; ++i) {
      const Scalar m = pm->values[static_cast<std::size_t>(i)];
      const Scalar sig = m >= 0 ? 1.0 / (1.0 + std::exp(-m)) : std::exp(m) / (1.0 + std::exp(m));
      g[static_cast<std::size_t>(i)] += gv * (sig - py->values[static_cast<std::size_t>(i)]);
    }
  });
  Scalar acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Scalar m = mu.values()[static_cast<std::size_t>(i)];
    const Scalar yy = y.values()[static_cast<std::size_t>(i)];
    acc += std::max(m, 0.0) - yy * m + std::log1p(std::exp(-std::abs(m)));
  }
  out.node()->values[0] = acc / static_cast<Scalar>(n);
  return out;
}

Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormStats& stats,
                 bool training, bool update_running, Scalar momentum, Scalar eps) {
  require_2d("batchnorm", x);
  const std::int64_t rows = x.rows(), cols = x.cols();
  if (rows == 0) throw std::invalid_argument("batchnorm: empty batch");
  if (gamma.size() != cols || beta.size() != cols) {
    throw std::invalid_argument("batchnorm: gamma/beta width must match " + shape_str(x.shape()));
  }
  if (static_cast<std::int64_t>(stats.running_mean.size()) != cols) {
    throw std::invalid_argument("batchnorm: running statistics width mismatch");
  }

  std::vector<Scalar> mean(static_cast<std::size_t>(cols));
  std::vector<Scalar> var(static_cast<std::size_t>(cols));
  if (training) {
    kn::col_moments(x.values().data(), mean.data(), var.data(), rows, cols);
    if (update_running) {
      for (std::int64_t c = 0; c < cols; ++c) {
        stats.running_mean[c] = (1.0 - momentum) * stats.running_mean[c] + momentum * mean[c];
        stats.running_var[c] = (1.0 - momentum) * stats.running_var[c] + momentum * var[c];
      }
    }
  } else {
    mean = stats.running_mean;
    var = stats.running_var;
  }

  std::vector<Scalar> inv_std(static_cast<std::size_t>(cols));
  for (std::int64_t c = 0; c < cols; ++c) inv_std[c] = 1.0 / std::sqrt(var[c] + eps);

  // xhat saved for the adjoint.
  auto xhat = std::make_shared<std::vector<Scalar>>(static_cast<std::size_t>(rows * cols));
  {
    const Scalar* xs = x.values().data();
    for (std::int64_t r = 0; r < rows; ++r)
      for (std::int64_t c = 0; c < cols; ++c)
        (*xhat)[r * cols + c] = (xs[r * cols + c] - mean[c]) * inv_std[c];
  }

  auto px = x.node_ptr();
  auto pg = gamma.node_ptr();
  auto pb = beta.node_ptr();
  Tensor out = make_node(
      x.shape(), {x, gamma, beta},
      [px, pg, pb, xhat, inv_std, training, rows, cols](TensorNode& self) {
        std::vector<Scalar> sum_g(static_cast<std::size_t>(cols), 0.0);
        std::vector<Scalar> sum_gx(static_cast<std::size_t>(cols), 0.0);
        for (std::int64_t r = 0; r < rows; ++r) {
          for (std::int64_t c = 0; c < cols; ++c) {
            sum_g[c] += self.grad[r * cols + c];
            sum_gx[c] += self.grad[r * cols + c] * (*xhat)[r * cols + c];
          }
        }
        if (pg->requires_grad) accumulate(pg, sum_gx.data());
        if (pb->requires_grad) accumulate(pb, sum_g.data());
        if (px->requires_grad) {
          auto& g = px->ensure_grad();
          const Scalar inv_n = 1.0 / static_cast<Scalar>(rows);
          for (std::int64_t r = 0; r < rows; ++r) {
            for (std::int64_t c = 0; c < cols; ++c) {
              const Scalar gy = self.grad[r * cols + c] * pg->values[static_cast<std::size_t>(c)];
              if (training) {
                // Batch statistics participate in the gradient.
                const Scalar corr =
                    (sum_g[c] * pg->values[static_cast<std::size_t>(c)] +
                     (*xhat)[r * cols + c] * sum_gx[c] * pg->values[static_cast<std::size_t>(c)]) *
                    inv_n;
                g[r * cols + c] += inv_std[c] * (gy - corr);
              } else {
                g[r * cols + c] += inv_std[c] * gy;
              }
            }
          }
        }
      });

  const Scalar* gs = gamma.values().data();
  const Scalar* bs = beta.values().data();
  Scalar* y = out.node()->values.data();
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) y[r * cols + c] = gs[c] * (*xhat)[r * cols + c] + bs[c];
  return out;
}

}  // namespace ddikit::core
