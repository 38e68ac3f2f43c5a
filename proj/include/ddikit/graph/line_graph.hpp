#pragma once

#include <utility>
#include <vector>

#include "ddikit/chem/molecule.hpp"

namespace ddikit::graph {

/// Line graph of a molecule: one node per bond, an edge wherever two bonds
/// share exactly one atom. Adjacency lists each unordered pair once with
/// a < b.
struct LineGraph {
  std::vector<int> node_of_bond;               // bond id -> line node (identity)
  std::vector<std::pair<int, int>> adjacency;  // line-node pairs
  std::vector<std::vector<int>> incidence;     // per atom: incident bond ids
};

/// Builds the line graph through per-atom incidence lists, linear in the sum
/// of squared degrees (the quadratic bond-pair scan survives as a test
/// oracle).
LineGraph build_line_graph(const chem::MolecularGraph& g);

}  // namespace ddikit::graph
