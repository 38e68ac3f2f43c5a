#pragma once

#include <cstdint>
#include <vector>

#include "ddikit/data/pairs.hpp"

namespace ddikit::eval {

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

struct SplitSpec {
  enum class Mode { Transductive, Inductive };
  Mode mode = Mode::Transductive;
  std::vector<std::size_t> train, valid, test;  // pair indices
  std::uint64_t seed = 0;
  std::vector<int> train_drugs;    // inductive only
  std::vector<int> test_drugs;     // inductive only
  std::size_t discarded_mixed = 0;  // inductive: pairs straddling the drug split
};

/// Edge-level split: pairs shuffled and cut by the ratios; any drug may
/// appear in every split. Throws when the ratios leave a split empty.
SplitSpec transductive_split(const std::vector<data::PairExample>& pairs, SplitRatios ratios,
                             std::uint64_t seed);

/// Drug-level split: a drug_ratio share of drugs trains, the rest test;
/// train pairs touch only train drugs, test pairs only test drugs, mixed
/// pairs are discarded and counted. Throws when either drug side is empty
/// (drug_ratio 1.0 has no test drugs).
SplitSpec inductive_split(const std::vector<data::PairExample>& pairs, int n_drugs,
                          double drug_ratio, std::uint64_t seed);

/// Scaling variant with a fixed held-out test side: test_fraction of drugs
/// is reserved first, then pool_ratio of the remaining pool trains. This is
/// the protocol for training-size curves, where the ratio may reach 1.0
/// while the test set stays intact.
SplitSpec inductive_scaling_split(const std::vector<data::PairExample>& pairs, int n_drugs,
                                  double test_fraction, double pool_ratio, std::uint64_t seed);

}  // namespace ddikit::eval
