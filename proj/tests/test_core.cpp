#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddikit/core/gradcheck.hpp"
#include "ddikit/core/kernels.hpp"
#include "ddikit/core/ops.hpp"
#include "ddikit/core/random.hpp"
#include "ddikit/core/tensor.hpp"
#include "support/test_helpers.hpp"

using namespace ddikit;
using core::Tensor;
namespace kn = core::kernels;

namespace {

core::GradCheckReport check_unary(const std::function<Tensor(const Tensor&)>& op,
                                  core::RandomStream& rng, core::Shape shape, double lo = -1.0,
                                  double hi = 1.0) {
  auto x = testing::random_tensor(rng, std::move(shape), lo, hi);
  return core::check_gradients(
      [&](const std::vector<Tensor>& in) { return core::sum_all(core::square(op(in[0]))); },
      {x}, 1e-5, 1e-4);
}

}  // namespace

TEST_CASE("forward values of basic primitives") {
  auto a = Tensor::from_values({2, 2}, {1, 2, 3, 4});
  auto eye = Tensor::from_values({2, 2}, {1, 0, 0, 1});
  auto prod = core::matmul(a, eye);
  CHECK(testing::bit_equal(prod.values(), a.values()));

  CHECK(core::sigmoid(Tensor::scalar(0.0)).item() == doctest::Approx(0.5));
  CHECK(core::tanh_op(Tensor::scalar(0.0)).item() == doctest::Approx(0.0));

  auto vals = Tensor::from_values({3, 1}, {1, 2, 3});
  auto scattered = core::scatter_sum(vals, {0, 0, 1}, 2);
  CHECK(scattered.values()[0] == doctest::Approx(3.0));
  CHECK(scattered.values()[1] == doctest::Approx(3.0));
}

TEST_CASE("sum of squares matches the quadratic's exact gradient") {
  auto x = Tensor::from_values({1, 3}, {1, 2, 3}, true);
  auto report = core::check_gradients(
      [](const std::vector<Tensor>& in) { return core::sum_all(core::square(in[0])); }, {x},
      1e-5, 1e-6);
  CHECK(report.ok());
  CHECK(report.max_rel_error < 1e-6);

  x.zero_grad();
  auto y = core::sum_all(core::square(x));
  y.backward();
  CHECK(x.grad()[0] == doctest::Approx(2.0));
  CHECK(x.grad()[1] == doctest::Approx(4.0));
  CHECK(x.grad()[2] == doctest::Approx(6.0));
}

TEST_CASE("sum has an all-ones gradient") {
  core::RandomStream rng(7);
  auto x = testing::random_tensor(rng, {3, 4});
  auto y = core::sum_all(x);
  y.backward();
  for (double g : x.grad()) CHECK(g == doctest::Approx(1.0));
}

TEST_CASE("every primitive passes central finite differences") {
  core::RandomStream rng(11);

  SUBCASE("matmul") {
    auto a = testing::random_tensor(rng, {3, 4});
    auto b = testing::random_tensor(rng, {4, 2});
    auto report = core::check_gradients(
        [](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::matmul(in[0], in[1])));
        },
        {a, b}, 1e-5, 1e-4);
    CHECK_MESSAGE(report.ok(), report.summary());
  }

  SUBCASE("add/sub/mul") {
    for (auto op : {core::add, core::sub, core::mul}) {
      auto a = testing::random_tensor(rng, {2, 5});
      auto b = testing::random_tensor(rng, {2, 5});
      auto report = core::check_gradients(
          [op](const std::vector<Tensor>& in) { return core::sum_all(core::square(op(in[0], in[1]))); },
          {a, b}, 1e-5, 1e-4);
      CHECK_MESSAGE(report.ok(), report.summary());
    }
  }

  SUBCASE("scale and add_scalar") {
    auto r1 = check_unary([](const Tensor& t) { return core::scale(t, -2.5); }, rng, {3, 3});
    CHECK_MESSAGE(r1.ok(), r1.summary());
    auto r2 = check_unary([](const Tensor& t) { return core::add_scalar(t, 0.7); }, rng, {3, 3});
    CHECK_MESSAGE(r2.ok(), r2.summary());
  }

  SUBCASE("elementwise nonlinearities") {
    auto rs = check_unary([](const Tensor& t) { return core::sigmoid(t); }, rng, {2, 4});
    CHECK_MESSAGE(rs.ok(), rs.summary());
    auto rt = check_unary([](const Tensor& t) { return core::tanh_op(t); }, rng, {2, 4});
    CHECK_MESSAGE(rt.ok(), rt.summary());
    auto re = check_unary([](const Tensor& t) { return core::exp_op(t); }, rng, {2, 4});
    CHECK_MESSAGE(re.ok(), re.summary());
    auto rl = check_unary([](const Tensor& t) { return core::log_op(t); }, rng, {2, 4}, 0.5, 2.0);
    CHECK_MESSAGE(rl.ok(), rl.summary());
    auto rq = check_unary([](const Tensor& t) { return core::square(t); }, rng, {2, 4});
    CHECK_MESSAGE(rq.ok(), rq.summary());
  }

  SUBCASE("prelu including the slope parameter") {
    auto x = testing::random_tensor(rng, {4, 3});
    auto slope = Tensor::from_values({1, 1}, {0.25}, true);
    auto report = core::check_gradients(
        [](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::prelu(in[0], in[1])));
        },
        {x, slope}, 1e-5, 1e-4);
    CHECK_MESSAGE(report.ok(), report.summary());
  }

  SUBCASE("clamp away from its boundaries") {
    auto x = testing::random_tensor(rng, {3, 3}, -0.8, 0.8);
    auto report = core::check_gradients(
        [](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::clamp(in[0], -1.0, 1.0)));
        },
        {x}, 1e-5, 1e-4);
    CHECK_MESSAGE(report.ok(), report.summary());
  }

  SUBCASE("softmax along both axes") {
    for (int axis : {0, 1}) {
      auto x = testing::random_tensor(rng, {3, 4});
      auto report = core::check_gradients(
          [axis](const std::vector<Tensor>& in) {
            return core::sum_all(core::square(core::softmax(in[0], axis)));
          },
          {x}, 1e-5, 1e-4);
      CHECK_MESSAGE(report.ok(), report.summary());
    }
  }

  SUBCASE("segment softmax") {
    auto x = testing::random_tensor(rng, {6, 1});
    std::vector<std::int64_t> seg{0, 0, 1, 1, 1, 2};
    auto report = core::check_gradients(
        [&seg](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::segment_softmax(in[0], seg, 3)));
        },
        {x}, 1e-5, 1e-4);
    CHECK_MESSAGE(report.ok(), report.summary());
  }

  SUBCASE("concat along both axes") {
    for (int axis : {0, 1}) {
      auto a = testing::random_tensor(rng, {2, 3});
      auto b = testing::random_tensor(rng, {2, 3});
      auto report = core::check_gradients(
          [axis](const std::vector<Tensor>& in) {
            return core::sum_all(core::square(core::concat(in[0], in[1], axis)));
          },
          {a, b}, 1e-5, 1e-4);
      CHECK_MESSAGE(report.ok(), report.summary());
    }
  }

  SUBCASE("transpose and reshape") {
    auto rt = check_unary([](const Tensor& t) { return core::transpose(t); }, rng, {3, 4});
    CHECK_MESSAGE(rt.ok(), rt.summary());
    auto rr = check_unary([](const Tensor& t) { return core::reshape(t, {2, 6}); }, rng, {3, 4});
    CHECK_MESSAGE(rr.ok(), rr.summary());
  }

  SUBCASE("gather and scatter") {
    auto x = testing::random_tensor(rng, {4, 3});
    std::vector<std::int64_t> idx{2, 0, 2, 3, 1};
    auto rg = core::check_gradients(
        [&idx](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::gather_rows(in[0], idx)));
        },
        {x}, 1e-5, 1e-4);
    CHECK_MESSAGE(rg.ok(), rg.summary());

    auto y = testing::random_tensor(rng, {5, 2});
    std::vector<std::int64_t> tgt{1, 0, 1, 2, 2};
    auto rs = core::check_gradients(
        [&tgt](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::scatter_sum(in[0], tgt, 3)));
        },
        {y}, 1e-5, 1e-4);
    CHECK_MESSAGE(rs.ok(), rs.summary());
  }

  SUBCASE("reductions") {
    auto rm = check_unary([](const Tensor& t) { return core::mean_all(t); }, rng, {4, 5});
    CHECK_MESSAGE(rm.ok(), rm.summary());
    for (int axis : {0, 1}) {
      auto r1 = check_unary([axis](const Tensor& t) { return core::sum_axis(t, axis); }, rng,
                            {4, 5});
      CHECK_MESSAGE(r1.ok(), r1.summary());
      auto r2 = check_unary([axis](const Tensor& t) { return core::mean_axis(t, axis); }, rng,
                            {4, 5});
      CHECK_MESSAGE(r2.ok(), r2.summary());
    }
  }

  SUBCASE("row-broadcast add and column-broadcast multiply") {
    auto x = testing::random_tensor(rng, {4, 3});
    auto b = testing::random_tensor(rng, {1, 3});
    auto ra = core::check_gradients(
        [](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::add_rowvec(in[0], in[1])));
        },
        {x, b}, 1e-5, 1e-4);
    CHECK_MESSAGE(ra.ok(), ra.summary());

    auto c = testing::random_tensor(rng, {4, 1});
    auto rc = core::check_gradients(
        [](const std::vector<Tensor>& in) {
          return core::sum_all(core::square(core::mul_colvec(in[0], in[1])));
        },
        {x, c}, 1e-5, 1e-4);
    CHECK_MESSAGE(rc.ok(), rc.summary());
  }

  SUBCASE("bce with logits") {
    auto mu = testing::random_tensor(rng, {6, 1}, -3.0, 3.0);
    auto y = Tensor::from_values({6, 1}, {1, 0, 1, 1, 0, 0});
    auto report = core::check_gradients(
        [&y](const std::vector<Tensor>& in) { return core::bce_with_logits_mean(in[0], y); },
        {mu}, 1e-5, 1e-4);
    CHECK_MESSAGE(report.ok(), report.summary());
  }

  SUBCASE("batchnorm in both modes") {
    auto x = testing::random_tensor(rng, {5, 3});
    auto gamma = testing::random_tensor(rng, {1, 3}, 0.5, 1.5);
    auto beta = testing::random_tensor(rng, {1, 3});
    for (bool training : {true, false}) {
      core::BatchNormStats stats(3);
      for (int c = 0; c < 3; ++c) {
        stats.running_mean[c] = 0.1 * c;
        stats.running_var[c] = 1.0 + 0.2 * c;
      }
      auto report = core::check_gradients(
          [&stats, training](const std::vector<Tensor>& in) {
            core::BatchNormStats local = stats;  // keep f deterministic
            return core::sum_all(
                core::square(core::batchnorm(in[0], in[1], in[2], local, training, false)));
          },
          {x, gamma, beta}, 1e-5, 1e-4);
      CHECK_MESSAGE(report.ok(), report.summary());
    }
  }
}

TEST_CASE("softmax rows are valid distributions") {
  core::RandomStream rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = static_cast<std::int64_t>(rng.uniform_int(6) + 1);
    const auto cols = static_cast<std::int64_t>(rng.uniform_int(7) + 1);
    auto x = testing::random_tensor(rng, {rows, cols}, -30.0, 30.0, false);
    auto y = core::softmax(x, 1);
    for (std::int64_t r = 0; r < rows; ++r) {
      double total = 0.0;
      for (std::int64_t c = 0; c < cols; ++c) {
        const double v = y.values()[r * cols + c];
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("softmax over an empty axis is rejected") {
  auto x = Tensor::zeros({3, 0});
  CHECK_THROWS_AS(core::softmax(x, 1), std::invalid_argument);
}

TEST_CASE("shape mismatches name the operation and shapes") {
  auto a = Tensor::zeros({2, 3});
  auto b = Tensor::zeros({4, 5});
  CHECK_THROWS_WITH_AS(core::matmul(a, b),
                       "matmul: incompatible shapes [2x3] and [4x5]", std::invalid_argument);
  CHECK_THROWS_AS(core::add(a, b), std::invalid_argument);
}

TEST_CASE("fan-out accumulates the sum of per-branch gradients") {
  core::RandomStream rng(31);
  auto x = testing::random_tensor(rng, {3, 3});

  // Shared-input analytic gradient.
  auto shared = core::check_gradients(
      [](const std::vector<Tensor>& in) {
        auto left = core::sigmoid(in[0]);
        auto right = core::square(in[0]);
        return core::sum_all(core::mul(left, right));
      },
      {x}, 1e-5, 1e-4);
  CHECK_MESSAGE(shared.ok(), shared.summary());

  // Against duplicated inputs: grad(shared) == grad(left-input) + grad(right-input).
  auto x1 = Tensor::from_values({3, 3}, {x.values().begin(), x.values().end()}, true);
  auto x2 = Tensor::from_values({3, 3}, {x.values().begin(), x.values().end()}, true);
  auto y_dup = core::sum_all(core::mul(core::sigmoid(x1), core::square(x2)));
  y_dup.backward();
  x.zero_grad();
  auto y_shared = core::sum_all(core::mul(core::sigmoid(x), core::square(x)));
  y_shared.backward();
  for (std::int64_t i = 0; i < x.size(); ++i) {
    CHECK(x.grad()[i] == doctest::Approx(x1.grad()[i] + x2.grad()[i]).epsilon(1e-12));
  }
}

TEST_CASE("backward without requires_grad leaves is a no-op") {
  auto x = Tensor::from_values({2, 2}, {1, 2, 3, 4}, false);
  auto y = core::sum_all(core::square(x));
  CHECK_NOTHROW(y.backward());
  CHECK_FALSE(x.has_grad());
}

TEST_CASE("a record is single-use") {
  auto x = Tensor::from_values({2, 1}, {1, 2}, true);
  auto y = core::sum_all(x);
  y.backward();
  CHECK_THROWS_AS(y.backward(), std::logic_error);
}

TEST_CASE("serial and OpenMP kernels agree bit-for-bit") {
  core::RandomStream rng(47);

  SUBCASE("gemm") {
    for (int trial = 0; trial < 4; ++trial) {
      const std::int64_t m = 17 + trial * 31, k = 23 + trial * 7, n = 19 + trial * 11;
      std::vector<double> a(static_cast<std::size_t>(m * k)), b(static_cast<std::size_t>(k * n));
      for (double& v : a) v = rng.uniform(-1, 1);
      for (double& v : b) v = rng.uniform(-1, 1);
      std::vector<double> c1(static_cast<std::size_t>(m * n)), c2(c1);
      kn::gemm_serial(a.data(), b.data(), c1.data(), m, k, n, false, false);
      kn::gemm_omp(a.data(), b.data(), c2.data(), m, k, n, false, false);
      CHECK(testing::bit_equal(c1, c2));
    }
  }

  SUBCASE("elementwise maps and reductions") {
    const std::int64_t n = 100003;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = rng.uniform(-2, 2);
    std::vector<double> y1(x.size()), y2(x.size());
    kn::unary_map_serial(kn::Unary::Tanh, x.data(), y1.data(), n);
    kn::unary_map_omp(kn::Unary::Tanh, x.data(), y2.data(), n);
    CHECK(testing::bit_equal(y1, y2));
    CHECK(kn::reduce_sum_serial(x.data(), n) == kn::reduce_sum_omp(x.data(), n));
  }

  SUBCASE("scatter with many collisions") {
    const std::int64_t n = 5000, m = 37, cols = 8;
    std::vector<double> x(static_cast<std::size_t>(n * cols));
    for (double& v : x) v = rng.uniform(-1, 1);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
    for (auto& v : idx) v = static_cast<std::int64_t>(rng.uniform_int(m));
    auto buckets = kn::build_row_buckets(idx.data(), n, m);
    std::vector<double> o1(static_cast<std::size_t>(m * cols)), o2(o1);
    kn::scatter_sum_rows_serial(x.data(), buckets, o1.data(), m, cols);
    kn::scatter_sum_rows_omp(x.data(), buckets, o2.data(), m, cols);
    CHECK(testing::bit_equal(o1, o2));
  }

  SUBCASE("softmax rows and column moments") {
    const std::int64_t rows = 301, cols = 33;
    std::vector<double> x(static_cast<std::size_t>(rows * cols));
    for (double& v : x) v = rng.uniform(-4, 4);
    std::vector<double> y1(x.size()), y2(x.size());
    kn::softmax_rows_serial(x.data(), y1.data(), rows, cols);
    kn::softmax_rows_omp(x.data(), y2.data(), rows, cols);
    CHECK(testing::bit_equal(y1, y2));

    std::vector<double> m1(cols), v1(cols), m2(cols), v2(cols);
    kn::col_moments_serial(x.data(), m1.data(), v1.data(), rows, cols);
    kn::col_moments_omp(x.data(), m2.data(), v2.data(), rows, cols);
    CHECK(testing::bit_equal(m1, m2));
    CHECK(testing::bit_equal(v1, v2));
  }

  SUBCASE("whole-op equality under the dispatch switch") {
    const bool was = kn::parallel_enabled();
    auto x = testing::random_tensor(rng, {130, 200}, -1, 1, false);
    auto w = testing::random_tensor(rng, {200, 60}, -1, 1, false);
    kn::set_parallel_enabled(false);
    auto serial = core::matmul(x, w);
    kn::set_parallel_enabled(true);
    auto parallel = core::matmul(x, w);
    kn::set_parallel_enabled(was);
    CHECK(testing::bit_equal(serial.values(), parallel.values()));
  }
}

TEST_CASE("random stream is reproducible and seed-sensitive") {
  core::RandomStream a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CHECK(a.next_u64() != c.next_u64());

  core::RandomStream n1(55), n2(55);
  std::vector<double> v1(64), v2(64);
  n1.fill_normal(v1);
  n2.fill_normal(v2);
  CHECK(testing::bit_equal(v1, v2));

  // Rough sanity on the normal moments.
  core::RandomStream big(99);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = big.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}
