#include "ddikit/eval/negatives.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "ddikit/core/random.hpp"

namespace ddikit::eval {

namespace {

NegativeSampleResult sample_impl(const std::vector<data::PairExample>& positives,
                                 const std::vector<int>& universe, double ratio,
                                 std::uint64_t seed) {
  if (positives.empty()) throw std::invalid_argument("sample_negatives: no positives");
  if (ratio <= 0.0) throw std::invalid_argument("sample_negatives: ratio must be > 0");
  if (universe.size() < 3) {
    throw std::invalid_argument("sample_negatives: drug universe too small to corrupt");
  }

  std::set<std::pair<int, int>> known;
  for (const auto& ex : positives) known.insert(std::minmax(ex.i, ex.j));
  std::set<std::pair<int, int>> emitted;

  const auto target = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(positives.size())));
  core::RandomStream rng(seed);
  NegativeSampleResult result;
  for (std::size_t k = 0; k < target; ++k) {
    const auto& base = positives[k % positives.size()];
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const bool corrupt_head = rng.uniform() < 0.5;
      const int replacement = universe[rng.uniform_int(universe.size())];
      data::PairExample neg = base;
      (corrupt_head ? neg.i : neg.j) = replacement;
      if (neg.i == neg.j) continue;
      const auto key = std::minmax(neg.i, neg.j);
      if (known.count(key) || emitted.count(key)) continue;
      neg.label = 0;
      emitted.insert(key);
      result.negatives.push_back(neg);
      placed = true;
    }
    if (!placed) ++result.skipped;
  }
  return result;
}

}  // namespace

NegativeSampleResult sample_negatives(const std::vector<data::PairExample>& positives,
                                      int n_drugs, double ratio, std::uint64_t seed) {
  std::vector<int> universe(static_cast<std::size_t>(std::max(n_drugs, 0)));
  for (int d = 0; d < n_drugs; ++d) universe[static_cast<std::size_t>(d)] = d;
  return sample_impl(positives, universe, ratio, seed);
}

NegativeSampleResult sample_negatives_from(const std::vector<data::PairExample>& positives,
                                           const std::vector<int>& universe, double ratio,
                                           std::uint64_t seed) {
  return sample_impl(positives, universe, ratio, seed);
}

}  // namespace ddikit::eval
