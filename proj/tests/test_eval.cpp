#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ddikit/eval/interpret.hpp"
#include "ddikit/eval/metrics.hpp"
#include "ddikit/eval/negatives.hpp"
#include "ddikit/eval/splits.hpp"
#include "support/corpora.hpp"
#include "support/oracles.hpp"
#include "support/test_helpers.hpp"

using namespace ddikit;

TEST_CASE("auroc on known rankings") {
  std::vector<double> s{0.9, 0.8, 0.3, 0.2};
  std::vector<int> perfect{1, 1, 0, 0};
  CHECK(eval::auroc(s, perfect) == doctest::Approx(1.0));

  std::vector<int> mixed{1, 0, 1, 0};
  CHECK(eval::auroc(s, mixed) == doctest::Approx(0.75));

  std::vector<double> ties{0.5, 0.5, 0.5, 0.5};
  CHECK(eval::auroc(ties, mixed) == doctest::Approx(0.5));

  std::vector<int> one_class{1, 1, 1, 1};
  CHECK_THROWS_AS(eval::auroc(s, one_class), std::invalid_argument);
}

TEST_CASE("auroc equals the pairwise oracle exactly") {
  core::RandomStream rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.uniform_int(60);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    int pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid forces plenty of ties.
      scores[i] = static_cast<double>(rng.uniform_int(8)) / 8.0;
      labels[i] = rng.uniform() < 0.4 ? 1 : 0;
      pos += labels[i];
    }
    if (pos == 0 || pos == static_cast<int>(n)) continue;
    CHECK(eval::auroc(scores, labels) == testing::auroc_pairwise(scores, labels));
  }
}

TEST_CASE("aupr on known rankings") {
  std::vector<double> s{0.9, 0.8, 0.3};
  std::vector<int> perfect{1, 1, 0};
  CHECK(eval::aupr(s, perfect) == doctest::Approx(1.0));

  std::vector<int> middle{0, 1, 0};
  CHECK(eval::aupr(s, middle) == doctest::Approx(0.5));

  std::vector<int> first{1, 0, 0};
  CHECK(eval::aupr(s, first) == doctest::Approx(1.0));

  std::vector<int> none{0, 0, 0};
  CHECK_THROWS_AS(eval::aupr(s, none), std::invalid_argument);
}

TEST_CASE("aupr equals the threshold-sweep oracle exactly") {
  core::RandomStream rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.uniform_int(60);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    int pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.uniform_int(8)) / 8.0;
      labels[i] = rng.uniform() < 0.4 ? 1 : 0;
      pos += labels[i];
    }
    if (pos == 0) continue;
    CHECK(eval::aupr(scores, labels) == testing::aupr_sweep(scores, labels));
  }
}

TEST_CASE("classification metrics from the confusion matrix") {
  std::vector<double> perfect{0.9, 0.8, 0.1, 0.2};
  std::vector<int> labels{1, 1, 0, 0};
  auto m = eval::classification_metrics(perfect, labels);
  CHECK(m.f1 == doctest::Approx(1.0));
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.precision == doctest::Approx(1.0));
  CHECK(m.recall == doctest::Approx(1.0));

  std::vector<double> all_low{0.1, 0.2, 0.3, 0.4};
  auto m2 = eval::classification_metrics(all_low, labels);
  CHECK(m2.recall == 0.0);
  CHECK(m2.precision == 0.0);
  CHECK_FALSE(m2.precision_defined);

  // TP = 1, FP = 1, FN = 1, TN = 1.
  std::vector<double> half{0.9, 0.1, 0.9, 0.1};
  std::vector<int> half_labels{1, 1, 0, 0};
  auto m3 = eval::classification_metrics(half, half_labels);
  CHECK(m3.precision == doctest::Approx(0.5));
  CHECK(m3.recall == doctest::Approx(0.5));
  CHECK(m3.f1 == doctest::Approx(0.5));
}

TEST_CASE("uncertainty-error correlation") {
  std::vector<double> x{1, 2, 3};
  std::vector<double> y{2, 4, 6};
  CHECK(eval::pearson(x, y) == doctest::Approx(1.0));
  std::vector<double> anti{6, 4, 2};
  CHECK(eval::pearson(x, anti) == doctest::Approx(-1.0));
  std::vector<double> constant{5, 5, 5};
  CHECK_THROWS_AS(eval::pearson(x, constant), std::invalid_argument);

  // Variance exactly proportional to squared error.
  std::vector<double> probs{0.9, 0.6, 0.2};
  std::vector<int> labels{1, 1, 1};
  std::vector<double> vars(3);
  for (int i = 0; i < 3; ++i) {
    const double e = probs[i] - 1.0;
    vars[i] = 3.0 * e * e;
  }
  CHECK(eval::uncertainty_error_correlation(vars, probs, labels) == doctest::Approx(1.0));
}

TEST_CASE("metrics are invariant under reordering") {
  core::RandomStream rng(73);
  std::vector<double> scores(40);
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = rng.uniform();
    labels[i] = i % 3 == 0 ? 1 : 0;
  }
  const double base_auroc = eval::auroc(scores, labels);
  const double base_aupr = eval::aupr(scores, labels);

  auto perm = rng.permutation(scores.size());
  std::vector<double> ps(scores.size());
  std::vector<int> pl(labels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    ps[i] = scores[perm[i]];
    pl[i] = labels[perm[i]];
  }
  CHECK(eval::auroc(ps, pl) == doctest::Approx(base_auroc).epsilon(1e-12));
  CHECK(eval::aupr(ps, pl) == doctest::Approx(base_aupr).epsilon(1e-12));
}

TEST_CASE("macro f1 over relation classes") {
  std::vector<int> pred{0, 1, 2, 0, 1, 2};
  std::vector<int> truth{0, 1, 2, 0, 1, 2};
  CHECK(eval::macro_f1(pred, truth, 3) == doctest::Approx(1.0));

  std::vector<int> constant(6, 0);
  // Class 0: precision 2/6, recall 1 -> f1 = 0.5; others 0.
  CHECK(eval::macro_f1(constant, truth, 3) == doctest::Approx(0.5 / 3.0));
}

TEST_CASE("transductive split") {
  std::vector<data::PairExample> pairs(10);
  auto spec = eval::transductive_split(pairs, {0.8, 0.1, 0.1}, 5);
  CHECK(spec.train.size() == 8);
  CHECK(spec.valid.size() == 1);
  CHECK(spec.test.size() == 1);

  auto spec2 = eval::transductive_split(pairs, {0.8, 0.1, 0.1}, 5);
  CHECK(spec.train == spec2.train);
  CHECK(spec.test == spec2.test);

  std::set<std::size_t> seen;
  for (auto* part : {&spec.train, &spec.valid, &spec.test}) {
    for (auto idx : *part) CHECK(seen.insert(idx).second);
  }
  CHECK(seen.size() == pairs.size());

  CHECK_THROWS_AS(eval::transductive_split(pairs, {0.99, 0.005, 0.005}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval::transductive_split(pairs, {0.5, 0.2, 0.2}, 5), std::invalid_argument);
}

TEST_CASE("inductive split keeps drugs disjoint") {
  core::RandomStream rng(74);
  std::vector<data::PairExample> pairs;
  const int n_drugs = 10;
  for (int i = 0; i < n_drugs; ++i) {
    for (int j = i + 1; j < n_drugs; ++j) {
      data::PairExample ex;
      ex.i = i;
      ex.j = j;
      ex.label = rng.uniform() < 0.5;
      pairs.push_back(ex);
    }
  }

  auto spec = eval::inductive_split(pairs, n_drugs, 0.5, 9);
  CHECK(spec.train_drugs.size() == 5);
  std::set<int> train_set(spec.train_drugs.begin(), spec.train_drugs.end());
  for (auto p : spec.test) {
    CHECK_FALSE(train_set.count(pairs[p].i));
    CHECK_FALSE(train_set.count(pairs[p].j));
  }
  for (auto p : spec.train) {
    CHECK(train_set.count(pairs[p].i));
    CHECK(train_set.count(pairs[p].j));
  }
  CHECK(spec.discarded_mixed == pairs.size() - spec.train.size() - spec.test.size());

  CHECK_THROWS_AS(eval::inductive_split(pairs, n_drugs, 1.0, 9), std::invalid_argument);

  // Scaling variant: full pool ratio keeps a non-empty test side.
  auto scaled = eval::inductive_scaling_split(pairs, n_drugs, 0.3, 1.0, 9);
  CHECK_FALSE(scaled.test.empty());
  CHECK_FALSE(scaled.train.empty());
  std::set<int> strain(scaled.train_drugs.begin(), scaled.train_drugs.end());
  for (auto p : scaled.test) {
    CHECK_FALSE(strain.count(pairs[p].i));
    CHECK_FALSE(strain.count(pairs[p].j));
  }

  // Invariants hold across seeds and ratios.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (double ratio : {0.2, 0.5, 0.8}) {
      auto s = eval::inductive_split(pairs, n_drugs, ratio, seed);
      std::set<int> tr(s.train_drugs.begin(), s.train_drugs.end());
      for (auto p : s.test) {
        CHECK_FALSE(tr.count(pairs[p].i));
        CHECK_FALSE(tr.count(pairs[p].j));
      }
    }
  }
}

TEST_CASE("negative sampling") {
  core::RandomStream rng(75);
  std::vector<data::PairExample> positives;
  const int n_drugs = 12;
  for (int k = 0; k < 10; ++k) {
    data::PairExample ex;
    ex.i = static_cast<int>(rng.uniform_int(n_drugs));
    ex.j = static_cast<int>((ex.i + 1 + rng.uniform_int(n_drugs - 1)) % n_drugs);
    ex.relation = static_cast<int>(rng.uniform_int(3));
    ex.label = 1;
    positives.push_back(ex);
  }
  std::set<std::pair<int, int>> known;
  for (const auto& ex : positives) known.insert(std::minmax(ex.i, ex.j));

  auto result = eval::sample_negatives(positives, n_drugs, 1.0, 3);
  CHECK(result.negatives.size() + result.skipped == positives.size());
  for (const auto& neg : result.negatives) {
    CHECK(neg.label == 0);
    CHECK(neg.i != neg.j);
    CHECK_FALSE(known.count(std::minmax(neg.i, neg.j)));
  }

  auto result2 = eval::sample_negatives(positives, n_drugs, 1.0, 3);
  REQUIRE(result.negatives.size() == result2.negatives.size());
  for (std::size_t k = 0; k < result.negatives.size(); ++k) {
    CHECK(result.negatives[k].i == result2.negatives[k].i);
    CHECK(result.negatives[k].j == result2.negatives[k].j);
  }

  CHECK_THROWS_AS(eval::sample_negatives(positives, 2, 1.0, 3), std::invalid_argument);
}

TEST_CASE("atom similarity matrices") {
  using core::Tensor;

  SUBCASE("identical embeddings are all flagged") {
    auto states = Tensor::from_values({3, 4}, std::vector<double>(12, 0.5));
    auto sim = eval::atom_similarity_matrix(states);
    for (std::size_t a = 0; a < 3; ++a) CHECK(sim.degenerate[a]);
    CHECK(std::isnan(sim.at(0, 1)));
  }

  SUBCASE("diagonal is one and proportional rows correlate fully") {
    auto states = Tensor::from_values({3, 3}, {1, 2, 3, 2, 4, 6, 3, 2, 1});
    auto sim = eval::atom_similarity_matrix(states);
    CHECK(sim.at(0, 0) == 1.0);
    CHECK(sim.at(1, 1) == 1.0);
    CHECK(sim.at(0, 1) == doctest::Approx(1.0));   // row 1 = 2 * row 0
    CHECK(sim.at(0, 2) == doctest::Approx(-1.0));  // reversed
    CHECK(sim.at(2, 0) == doctest::Approx(-1.0));
  }
}

TEST_CASE("gradient attribution") {
  model::ModelConfig cfg;
  cfg.hidden_dim = 8;
  model::ModelParams params(cfg);
  core::RandomStream rng(76);
  params.init(rng);

  auto a = testing::parsed("CO");
  auto b = testing::parsed("CCN");

  SUBCASE("scores are normalized distributions") {
    auto attr = eval::atom_attribution(params, a, b, 0);
    double total = 0.0;
    for (double v : attr.left.scores) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(attr.left.flagged_uniform);
    CHECK(attr.left.neighbourhood.size() >= 2);  // top atom plus its neighbour
  }

  SUBCASE("all-zero weights give a flagged uniform attribution") {
    model::ModelParams zero(cfg);
    auto attr = eval::atom_attribution(zero, a, b, 0);
    CHECK(attr.left.flagged_uniform);
    for (double v : attr.left.scores) CHECK(v == doctest::Approx(0.5));
  }

  SUBCASE("matches a feature-perturbation oracle on a two-atom molecule") {
    // Numeric per-atom sensitivity: L2 norm of central differences of mu
    // over every input feature of that atom.
    auto attr = eval::atom_attribution(params, a, b, 0);

    auto mu_of = [&](const chem::MolecularGraph& mol) {
      auto out = model::forward_pair(params, mol, b, 0, model::Mode::Eval);
      return out.mu;
    };
    const double h = 1e-5;
    std::vector<double> numeric(a.atoms.size(), 0.0);
    for (std::size_t atom = 0; atom < a.atoms.size(); ++atom) {
      double sq = 0.0;
      for (int f = 0; f < chem::kNodeFeatureDim; ++f) {
        auto up = a;
        auto down = a;
        up.node_features[atom * chem::kNodeFeatureDim + f] += h;
        down.node_features[atom * chem::kNodeFeatureDim + f] -= h;
        const double g = (mu_of(up) - mu_of(down)) / (2.0 * h);
        sq += g * g;
      }
      numeric[atom] = std::sqrt(sq);
    }
    const double total = numeric[0] + numeric[1];
    CHECK(attr.left.scores[0] == doctest::Approx(numeric[0] / total).epsilon(1e-4));
    CHECK(attr.left.scores[1] == doctest::Approx(numeric[1] / total).epsilon(1e-4));
    const bool analytic_order = attr.left.scores[0] > attr.left.scores[1];
    const bool numeric_order = numeric[0] > numeric[1];
    CHECK(analytic_order == numeric_order);
  }
}
