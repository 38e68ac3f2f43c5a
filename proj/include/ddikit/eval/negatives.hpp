#pragma once

#include <cstdint>
#include <vector>

#include "ddikit/data/pairs.hpp"

namespace ddikit::eval {

struct NegativeSampleResult {
  std::vector<data::PairExample> negatives;  // label 0, relation kept
  std::size_t skipped = 0;                   // positives that exhausted 100 attempts
};

/// For each wanted negative, corrupts one side of a positive (head or tail
/// with probability one half) with a uniformly random drug so that the
/// corrupted unordered pair is absent from the positive set. Rejection
/// samples up to 100 attempts, then skips. ratio scales the target count
/// relative to the number of positives.
NegativeSampleResult sample_negatives(const std::vector<data::PairExample>& positives,
                                      int n_drugs, double ratio, std::uint64_t seed);

/// Same procedure with replacement drugs drawn from an explicit id list
/// (inductive splits corrupt within their own drug side).
NegativeSampleResult sample_negatives_from(const std::vector<data::PairExample>& positives,
                                           const std::vector<int>& universe, double ratio,
                                           std::uint64_t seed);

}  // namespace ddikit::eval
