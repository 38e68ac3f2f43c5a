#include "ddikit/eval/splits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ddikit/core/random.hpp"

namespace ddikit::eval {

SplitSpec transductive_split(const std::vector<data::PairExample>& pairs, SplitRatios ratios,
                             std::uint64_t seed) {
  if (std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw std::invalid_argument("transductive_split: ratios must sum to 1");
  }
  const std::size_t n = pairs.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * static_cast<double>(n)));
  const auto n_valid = static_cast<std::size_t>(std::llround(ratios.valid * static_cast<double>(n)));
  if (n_train == 0 || n_valid == 0 || n_train + n_valid >= n) {
    throw std::invalid_argument("transductive_split: ratios leave an empty split");
  }

  core::RandomStream rng(seed);
  auto perm = rng.permutation(n);

  SplitSpec spec;
  spec.mode = SplitSpec::Mode::Transductive;
  spec.seed = seed;
  spec.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  spec.valid.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                    perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  spec.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), perm.end());
  return spec;
}

namespace {

SplitSpec assign_by_drugs(const std::vector<data::PairExample>& pairs,
                          const std::vector<char>& is_train, const std::vector<char>& is_test,
                          std::uint64_t seed) {
  SplitSpec spec;
  spec.mode = SplitSpec::Mode::Inductive;
  spec.seed = seed;
  for (int d = 0; d < static_cast<int>(is_train.size()); ++d) {
    if (is_train[static_cast<std::size_t>(d)]) spec.train_drugs.push_back(d);
    if (is_test[static_cast<std::size_t>(d)]) spec.test_drugs.push_back(d);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& ex = pairs[p];
    const bool i_train = is_train[static_cast<std::size_t>(ex.i)];
    const bool j_train = is_train[static_cast<std::size_t>(ex.j)];
    const bool i_test = is_test[static_cast<std::size_t>(ex.i)];
    const bool j_test = is_test[static_cast<std::size_t>(ex.j)];
    if (i_train && j_train) {
      spec.train.push_back(p);
    } else if (i_test && j_test) {
      spec.test.push_back(p);
    } else {
      ++spec.discarded_mixed;
    }
  }
  return spec;
}

}  // namespace

SplitSpec inductive_split(const std::vector<data::PairExample>& pairs, int n_drugs,
                          double drug_ratio, std::uint64_t seed) {
  if (n_drugs < 2) throw std::invalid_argument("inductive_split: needs at least two drugs");
  if (drug_ratio <= 0.0 || drug_ratio > 1.0) {
    throw std::invalid_argument("inductive_split: drug_ratio must be in (0, 1]");
  }
  const auto n_train =
      static_cast<std::size_t>(std::llround(drug_ratio * static_cast<double>(n_drugs)));
  if (n_train == 0 || n_train >= static_cast<std::size_t>(n_drugs)) {
    throw std::invalid_argument("inductive_split: drug_ratio leaves an empty side");
  }

  core::RandomStream rng(seed);
  auto perm = rng.permutation(static_cast<std::size_t>(n_drugs));
  std::vector<char> is_train(static_cast<std::size_t>(n_drugs), 0);
  std::vector<char> is_test(static_cast<std::size_t>(n_drugs), 0);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    (k < n_train ? is_train : is_test)[perm[k]] = 1;
  }
  return assign_by_drugs(pairs, is_train, is_test, seed);
}

SplitSpec inductive_scaling_split(const std::vector<data::PairExample>& pairs, int n_drugs,
                                  double test_fraction, double pool_ratio, std::uint64_t seed) {
  if (n_drugs < 2) throw std::invalid_argument("inductive_scaling_split: needs at least two drugs");
  if (test_fraction <= 0.0 || test_fraction >= 1.0) {
    throw std::invalid_argument("inductive_scaling_split: test_fraction must be in (0, 1)");
  }
  if (pool_ratio <= 0.0 || pool_ratio > 1.0) {
    throw std::invalid_argument("inductive_scaling_split: pool_ratio must be in (0, 1]");
  }
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n_drugs)));
  const std::size_t pool = static_cast<std::size_t>(n_drugs) - n_test;
  const auto n_train = static_cast<std::size_t>(std::llround(pool_ratio * static_cast<double>(pool)));
  if (n_test == 0 || pool == 0 || n_train == 0) {
    throw std::invalid_argument("inductive_scaling_split: an empty side resulted");
  }

  core::RandomStream rng(seed);
  auto perm = rng.permutation(static_cast<std::size_t>(n_drugs));
  std::vector<char> is_train(static_cast<std::size_t>(n_drugs), 0);
  std::vector<char> is_test(static_cast<std::size_t>(n_drugs), 0);
  for (std::size_t k = 0; k < n_test; ++k) is_test[perm[k]] = 1;
  for (std::size_t k = n_test; k < n_test + n_train; ++k) is_train[perm[k]] = 1;
  return assign_by_drugs(pairs, is_train, is_test, seed);
}

}  // namespace ddikit::eval
