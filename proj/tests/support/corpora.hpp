#pragma once

#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ddikit/chem/featurize.hpp"
#include "ddikit/chem/smiles.hpp"
#include "ddikit/data/pairs.hpp"
#include "support/synthetic.hpp"

namespace ddikit::testing {

inline bool contains_carbonyl(const chem::MolecularGraph& g) {
  for (const auto& b : g.bonds) {
    if (b.record.order != chem::BondOrder::Double) continue;
    const auto& eu = g.atoms[static_cast<std::size_t>(b.u)].element;
    const auto& ev = g.atoms[static_cast<std::size_t>(b.v)].element;
    if ((eu == "C" && ev == "O") || (eu == "O" && ev == "C")) return true;
  }
  return false;
}

inline chem::MolecularGraph parsed(const std::string& smiles) {
  auto g = chem::parse_smiles(smiles);
  chem::featurize_graph(g);
  return g;
}

/// Distinct random molecules paired with random binary labels: the
/// memorization workload.
inline data::PairDataset random_label_dataset(std::uint64_t seed, int n_molecules, int n_pairs,
                                              int n_relations = 1) {
  core::RandomStream rng(seed);
  data::PairDataset data;
  std::set<std::string> seen;
  while (static_cast<int>(data.molecules.size()) < n_molecules) {
    const std::string smiles = random_smiles(rng);
    if (!seen.insert(smiles).second) continue;
    data.molecules.push_back(parsed(smiles));
  }
  data.relation_count = n_relations;
  std::set<std::pair<int, int>> used;
  while (static_cast<int>(data.pairs.size()) < n_pairs) {
    const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_molecules)));
    const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_molecules)));
    if (i == j || !used.insert(std::minmax(i, j)).second) continue;
    data::PairExample ex;
    ex.i = i;
    ex.j = j;
    ex.relation = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_relations)));
    ex.label = rng.uniform() < 0.5 ? 1 : 0;
    data.pairs.push_back(ex);
  }
  return data;
}

/// Structure-determined labels: y = 1 iff both molecules contain a carbonyl.
/// Roughly half the molecules carry one; labels follow the rule exactly
/// unless noise_rate flips them.
inline data::PairDataset carbonyl_rule_dataset(std::uint64_t seed, int n_molecules, int n_pairs,
                                               double noise_rate = 0.0) {
  core::RandomStream rng(seed);
  data::PairDataset data;
  std::set<std::string> seen;
  while (static_cast<int>(data.molecules.size()) < n_molecules) {
    MoleculeOptions opt;
    const bool want_carbonyl = data.molecules.size() % 2 == 0;
    opt.force_carbonyl = want_carbonyl;
    opt.allow_carbonyl = want_carbonyl;
    opt.min_atoms = 4;
    opt.max_atoms = 9;
    const std::string smiles = random_smiles(rng, opt);
    if (!seen.insert(smiles).second) continue;
    auto g = parsed(smiles);
    if (contains_carbonyl(g) != want_carbonyl) continue;
    data.molecules.push_back(std::move(g));
  }
  std::set<std::pair<int, int>> used;
  while (static_cast<int>(data.pairs.size()) < n_pairs) {
    const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_molecules)));
    const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_molecules)));
    if (i == j || !used.insert(std::minmax(i, j)).second) continue;
    data::PairExample ex;
    ex.i = i;
    ex.j = j;
    ex.relation = 0;
    const bool rule = contains_carbonyl(data.molecules[static_cast<std::size_t>(i)]) &&
                      contains_carbonyl(data.molecules[static_cast<std::size_t>(j)]);
    ex.label = rule ? 1 : 0;
    if (noise_rate > 0.0 && rng.uniform() < noise_rate) ex.label = 1 - ex.label;
    data.pairs.push_back(ex);
  }
  return data;
}

/// Four structural motifs; a pair labelled with relation r interacts iff both
/// molecules carry motif r. Every molecule carries exactly one motif, so the
/// correct relation id is essential information.
inline data::PairDataset relation_rule_dataset(std::uint64_t seed, int n_molecules, int n_pairs) {
  core::RandomStream rng(seed);
  data::PairDataset data;
  data.relation_count = 4;
  // Motif skeletons: carbonyl, aromatic ring, triple bond, sulfur chain. The
  // C/N/O tails keep each motif exclusive to its class.
  auto motif_smiles = [&](int motif) {
    const int len = 2 + static_cast<int>(rng.uniform_int(5));
    static const char pool[] = {'C', 'C', 'N', 'O'};
    std::string chain;
    for (int k = 0; k < len; ++k) chain += pool[rng.uniform_int(4)];
    switch (motif) {
      case 0:
        return "C(=O)" + chain;
      case 1:
        return "c1ccccc1" + chain;
      case 2:
        return "N#C" + chain;
      default:
        return "S" + chain;
    }
  };
  std::vector<int> motif_of;
  std::set<std::string> seen;
  while (static_cast<int>(data.molecules.size()) < n_molecules) {
    const int motif = static_cast<int>(data.molecules.size()) % 4;
    const std::string smiles = motif_smiles(motif);
    if (!seen.insert(smiles).second) continue;
    data.molecules.push_back(parsed(smiles));
    motif_of.push_back(motif);
  }
  std::set<std::tuple<int, int, int>> used;
  while (static_cast<int>(data.pairs.size()) < n_pairs) {
    const int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_molecules)));
    const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_molecules)));
    if (i == j) continue;
    const int r = static_cast<int>(rng.uniform_int(4));
    if (!used.insert({std::min(i, j), std::max(i, j), r}).second) continue;
    data::PairExample ex;
    ex.i = i;
    ex.j = j;
    ex.relation = r;
    ex.label = (motif_of[static_cast<std::size_t>(i)] == r &&
                motif_of[static_cast<std::size_t>(j)] == r)
                   ? 1
                   : 0;
    data.pairs.push_back(ex);
  }
  return data;
}

inline std::vector<std::size_t> all_indices(const data::PairDataset& data) {
  std::vector<std::size_t> idx(data.pairs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

}  // namespace ddikit::testing
