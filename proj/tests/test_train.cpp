#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddikit/train/adamw.hpp"
#include "ddikit/train/loss.hpp"
#include "ddikit/train/trainer.hpp"
#include "support/corpora.hpp"
#include "support/test_helpers.hpp"

using namespace ddikit;
using core::Tensor;

TEST_CASE("binary cross-entropy identities") {
  auto y1 = Tensor::from_values({1, 1}, {1.0});
  auto y0 = Tensor::from_values({1, 1}, {0.0});
  auto zero = Tensor::from_values({1, 1}, {0.0});
  CHECK(train::bce_with_logits(zero, y1).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(train::bce_with_logits(zero, y0).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  auto huge = Tensor::from_values({1, 1}, {50.0});
  const double v = train::bce_with_logits(huge, y1).item();
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
  const double w = train::bce_with_logits(huge, y0).item();
  CHECK(w == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("uncertainty loss values and its minimizer") {
  auto y1 = Tensor::from_values({1, 1}, {1.0});
  auto s0 = Tensor::from_values({1, 1}, {0.0});

  // sigmoid(40) rounds to 1.0 exactly in double precision.
  auto saturated = Tensor::from_values({1, 1}, {40.0});
  CHECK(train::uncertainty_loss(saturated, s0, y1).item() == doctest::Approx(0.0));

  // error 0.5 at s = 0 costs 0.25.
  auto mid = Tensor::from_values({1, 1}, {0.0});
  CHECK(train::uncertainty_loss(mid, s0, y1).item() == doctest::Approx(0.25));

  // The per-example optimum over s sits at ln(e^2); locate it numerically.
  for (double err : {0.1, 0.3, 0.5}) {
    double best_s = 0.0, best_f = 1e300;
    for (double s = -8.0; s <= 4.0; s += 1e-4) {
      const double f = err * err * std::exp(-s) + s;
      if (f < best_f) {
        best_f = f;
        best_s = s;
      }
    }
    CHECK(std::abs(best_s - std::log(err * err)) < 1e-3);
  }
}

TEST_CASE("total loss combination") {
  auto one = Tensor::scalar(1.0);
  auto two = Tensor::scalar(2.0);
  auto three = Tensor::scalar(3.0);
  auto zero = Tensor::scalar(0.0);

  auto plain = train::total_loss(one, two, three, 0.0, 0.0);
  CHECK(plain.total.item() == doctest::Approx(1.0));

  auto mixed = train::total_loss(one, two, three, 0.1, 0.01);
  CHECK(mixed.total.item() == doctest::Approx(1.23).epsilon(1e-12));

  auto zeros = train::total_loss(zero, zero, zero, 0.5, 0.5);
  CHECK(zeros.total.item() == doctest::Approx(0.0));
}

TEST_CASE("adamw update rules") {
  SUBCASE("zero gradient, zero decay leaves parameters alone") {
    auto p = Tensor::from_values({1, 3}, {1.0, -2.0, 3.0}, true);
    train::AdamW opt({{"p", p}});
    opt.step(0.5, 0.0);
    CHECK(p.values()[0] == 1.0);
    CHECK(p.values()[1] == -2.0);
    CHECK(p.values()[2] == 3.0);
  }

  SUBCASE("decoupled decay acts alone on a zero gradient") {
    auto p = Tensor::from_values({1, 2}, {2.0, -4.0}, true);
    train::AdamW opt({{"p", p}});
    opt.step(1.0, 0.1);
    CHECK(p.values()[0] == doctest::Approx(1.8));
    CHECK(p.values()[1] == doctest::Approx(-3.6));
  }

  SUBCASE("first step moves by about lr in the gradient direction") {
    auto p = Tensor::from_values({1, 1}, {0.7}, true);
    p.grad_mut()[0] = 0.35;
    train::AdamW opt({{"p", p}});
    opt.step(1e-3, 0.0);
    // Bias correction makes m_hat = g, v_hat = g^2 at step one.
    CHECK(p.values()[0] == doctest::Approx(0.7 - 1e-3).epsilon(1e-6));

    auto q = Tensor::from_values({1, 1}, {0.7}, true);
    q.grad_mut()[0] = -0.35;
    train::AdamW opt2({{"q", q}});
    opt2.step(1e-3, 0.0);
    CHECK(q.values()[0] == doctest::Approx(0.7 + 1e-3).epsilon(1e-6));
  }

  SUBCASE("non-finite gradients are reported with the parameter name") {
    auto p = Tensor::from_values({1, 1}, {0.0}, true);
    p.grad_mut()[0] = std::numeric_limits<double>::quiet_NaN();
    train::AdamW opt({{"offender", p}});
    CHECK_THROWS_WITH_AS(opt.step(1e-3, 0.0),
                         "adamw: non-finite gradient in parameter offender at element 0",
                         std::runtime_error);
  }
}

TEST_CASE("cosine annealing schedule") {
  CHECK(train::cosine_lr(0, 100, 1e-4) == doctest::Approx(1e-4));
  CHECK(train::cosine_lr(100, 100, 1e-4) == doctest::Approx(0.0));
  CHECK(train::cosine_lr(50, 100, 1e-4) == doctest::Approx(5e-5));
  CHECK_THROWS_AS(train::cosine_lr(0, 0, 1e-4), std::invalid_argument);
}

namespace {

train::TrainConfig small_config() {
  train::TrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.scales = 2;
  cfg.iterations = 1;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.accumulation_steps = 1;
  cfg.learning_rate = 1e-3;
  cfg.seed = 9;
  return cfg;
}

double max_param_rel_diff(const model::ModelParams& a, const model::ModelParams& b) {
  auto pa = a.named_parameters();
  auto pb = b.named_parameters();
  double worst = 0.0;
  for (std::size_t p = 0; p < pa.size(); ++p) {
    auto va = pa[p].second.values();
    auto vb = pb[p].second.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double denom = std::max({std::abs(va[i]), std::abs(vb[i]), 1e-8});
      worst = std::max(worst, std::abs(va[i] - vb[i]) / denom);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("same seed gives bit-identical trained parameters") {
  auto data = testing::random_label_dataset(100, 12, 16);
  auto idx = testing::all_indices(data);
  auto cfg = small_config();
  auto run1 = train::fit(data, idx, cfg);
  auto run2 = train::fit(data, idx, cfg);

  auto p1 = run1.params.named_parameters();
  auto p2 = run2.params.named_parameters();
  for (std::size_t p = 0; p < p1.size(); ++p) {
    CHECK(testing::bit_equal(p1[p].second.values(), p2[p].second.values()));
  }
  REQUIRE(run1.log.size() == run2.log.size());
  for (std::size_t e = 0; e < run1.log.size(); ++e) {
    CHECK(run1.log[e].loss.total == run2.log[e].loss.total);
  }
}

TEST_CASE("accumulation_steps = 1 matches a hand-rolled reference loop") {
  auto data = testing::random_label_dataset(101, 10, 8);
  auto idx = testing::all_indices(data);
  auto cfg = small_config();
  cfg.epochs = 1;
  cfg.batch_size = 8;
  cfg.freeze_batchnorm = true;

  auto fitted = train::fit(data, idx, cfg);

  // Reference: same components, explicit loop, one batch = all 8 pairs.
  model::ModelParams params(cfg.model_config(data.relation_count));
  core::RandomStream init_rng(core::seed_mix(cfg.seed, 0xddf1));
  params.init(init_rng);
  train::AdamW opt(params.named_parameters());

  core::RandomStream shuffle_rng(core::seed_mix(cfg.seed, 0x5f0e, 0));
  auto perm = shuffle_rng.permutation(idx.size());

  std::vector<const chem::MolecularGraph*> lg, rg;
  std::vector<int> rel;
  std::vector<double> lab;
  for (std::size_t p = 0; p < perm.size(); ++p) {
    const auto& ex = data.pairs[idx[perm[p]]];
    lg.push_back(&data.molecules[static_cast<std::size_t>(ex.i)]);
    rg.push_back(&data.molecules[static_cast<std::size_t>(ex.j)]);
    rel.push_back(ex.relation);
    lab.push_back(ex.label);
  }
  auto left = graph::batch_graphs(lg, chem::kNodeFeatureDim, chem::kEdgeFeatureDim);
  auto right = graph::batch_graphs(rg, chem::kNodeFeatureDim, chem::kEdgeFeatureDim);
  for (std::size_t p = 0; p < perm.size(); ++p) {
    left.noise_seed[p] = core::seed_mix(cfg.seed, 0, static_cast<std::uint64_t>(p), 0);
    right.noise_seed[p] = core::seed_mix(cfg.seed, 0, static_cast<std::uint64_t>(p), 1);
  }
  auto fwd = model::forward_batch(params, left, model::make_inputs(left), right,
                                  model::make_inputs(right), rel, model::Mode::Train,
                                  model::BnPolicy::frozen());
  auto labels = Tensor::from_values({static_cast<std::int64_t>(lab.size()), 1}, lab);
  auto loss = train::total_loss(train::bce_with_logits(fwd.mu, labels),
                                train::uncertainty_loss(fwd.mu, fwd.s, labels),
                                core::add(core::mean_all(fwd.kl_i), core::mean_all(fwd.kl_j)),
                                cfg.lambda_unc, cfg.lambda_kl);
  loss.total.backward();
  opt.step(train::cosine_lr(0, 1, cfg.learning_rate), cfg.weight_decay);

  CHECK(max_param_rel_diff(fitted.params, params) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gradient accumulation reproduces the large batch") {
  auto data = testing::random_label_dataset(102, 24, 32);
  auto idx = testing::all_indices(data);

  auto cfg_acc = small_config();
  cfg_acc.epochs = 2;
  cfg_acc.batch_size = 8;
  cfg_acc.accumulation_steps = 4;
  cfg_acc.freeze_batchnorm = true;  // batch statistics would differ by layout

  auto cfg_big = cfg_acc;
  cfg_big.batch_size = 32;
  cfg_big.accumulation_steps = 1;

  auto run_acc = train::fit(data, idx, cfg_acc);
  auto run_big = train::fit(data, idx, cfg_big);

  CHECK(run_acc.optimizer_steps == run_big.optimizer_steps);
  CHECK(max_param_rel_diff(run_acc.params, run_big.params) < 1e-5);
}

TEST_CASE("training reduces the loss on a small workload") {
  auto data = testing::random_label_dataset(103, 16, 16);
  auto idx = testing::all_indices(data);
  auto cfg = small_config();
  cfg.epochs = 30;
  cfg.learning_rate = 3e-3;

  auto run = train::fit(data, idx, cfg);
  CHECK(run.log.back().loss.pred < run.log.front().loss.pred);
  CHECK(run.log.back().loss.total < run.log.front().loss.total);
  CHECK(train::eval_bce(run.params, data, idx) < run.log.front().loss.pred);
}

TEST_CASE("non-finite losses abort with the batch index") {
  auto data = testing::random_label_dataset(104, 8, 6);
  auto idx = testing::all_indices(data);
  auto cfg = small_config();
  // An absurd learning rate overflows the logits within a few steps.
  cfg.learning_rate = 1e18;
  cfg.epochs = 50;
  CHECK_THROWS_AS(train::fit(data, idx, cfg), std::runtime_error);
}

TEST_CASE("fit validates its inputs") {
  auto data = testing::random_label_dataset(105, 6, 4);
  train::TrainConfig bad = small_config();
  bad.accumulation_steps = 0;
  CHECK_THROWS_AS(train::fit(data, testing::all_indices(data), bad), std::invalid_argument);
  CHECK_THROWS_AS(train::fit(data, {}, small_config()), std::invalid_argument);
  CHECK_THROWS_AS(train::fit(data, {99}, small_config()), std::invalid_argument);
}
