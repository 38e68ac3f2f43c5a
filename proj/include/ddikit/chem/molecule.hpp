#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ddikit::chem {

enum class Hybridization { Sp, Sp2, Sp3, Other };

enum class BondOrder { Single, Double, Triple, Aromatic };

/// Heavy-atom element vocabulary (organic subset). Feature one-hots reserve
/// one extra slot for anything outside it.
inline constexpr std::array<const char*, 10> kElementVocab = {"B", "C",  "N",  "O", "P",
                                                              "S", "F", "Cl", "Br", "I"};

struct AtomRecord {
  std::string element;
  int degree = 0;
  int formal_charge = 0;
  bool aromatic = false;
  bool from_bracket = false;
  Hybridization hybridization = Hybridization::Sp3;
};

struct BondRecord {
  BondOrder order = BondOrder::Single;
  bool in_ring = false;
};

struct Bond {
  int u = 0;
  int v = 0;
  BondRecord record;
};

struct MolecularGraph {
  std::vector<AtomRecord> atoms;
  std::vector<Bond> bonds;

  // Populated by featurize_graph, row-major |V| x d_v and |E| x d_e.
  std::vector<double> node_features;
  std::vector<double> edge_features;

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int bond_count() const { return static_cast<int>(bonds.size()); }
  bool featurized() const { return !node_features.empty() || atoms.empty(); }

  std::vector<std::vector<int>> adjacency() const;  // neighbour atom ids per atom
};

}  // namespace ddikit::chem
