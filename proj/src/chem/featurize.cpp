#include "ddikit/chem/featurize.hpp"

#include <algorithm>

namespace ddikit::chem {

namespace {

int element_index(const std::string& sym) {
  for (std::size_t i = 0; i < kElementVocab.size(); ++i) {
    if (sym == kElementVocab[i]) return static_cast<int>(i);
  }
  return static_cast<int>(kElementVocab.size());  // "other" slot
}

}  // namespace

void featurize_graph(MolecularGraph& g) {
  g.node_features.assign(g.atoms.size() * static_cast<std::size_t>(kNodeFeatureDim), 0.0);
  for (std::size_t a = 0; a < g.atoms.size(); ++a) {
    const AtomRecord& atom = g.atoms[a];
    double* row = g.node_features.data() + a * kNodeFeatureDim;
    int base = 0;
    row[base + element_index(atom.element)] = 1.0;
    base += kElementBlock;
    row[base + std::clamp(atom.degree, 0, kDegreeBlock - 1)] = 1.0;
    base += kDegreeBlock;
    row[base + std::clamp(atom.formal_charge, -2, 2) + 2] = 1.0;
    base += kChargeBlock;
    row[base + static_cast<int>(atom.hybridization)] = 1.0;
    base += kHybridizationBlock;
    row[base] = atom.aromatic ? 1.0 : 0.0;
  }

  g.edge_features.assign(g.bonds.size() * static_cast<std::size_t>(kEdgeFeatureDim), 0.0);
  for (std::size_t b = 0; b < g.bonds.size(); ++b) {
    double* row = g.edge_features.data() + b * kEdgeFeatureDim;
    row[static_cast<int>(g.bonds[b].record.order)] = 1.0;
    row[4] = g.bonds[b].record.in_ring ? 1.0 : 0.0;
  }
}

}  // namespace ddikit::chem
