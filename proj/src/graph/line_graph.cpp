#include "ddikit/graph/line_graph.hpp"

namespace ddikit::graph {

LineGraph build_line_graph(const chem::MolecularGraph& g) {
  LineGraph lg;
  lg.node_of_bond.resize(static_cast<std::size_t>(g.bond_count()));
  for (int b = 0; b < g.bond_count(); ++b) lg.node_of_bond[static_cast<std::size_t>(b)] = b;

  lg.incidence.resize(g.atoms.size());
  for (int b = 0; b < g.bond_count(); ++b) {
    lg.incidence[static_cast<std::size_t>(g.bonds[b].u)].push_back(b);
    lg.incidence[static_cast<std::size_t>(g.bonds[b].v)].push_back(b);
  }

  // Two distinct bonds share at most one atom, so each pair surfaces at
  // exactly one incidence list.
  for (const auto& bonds_at_atom : lg.incidence) {
    for (std::size_t i = 0; i < bonds_at_atom.size(); ++i) {
      for (std::size_t j = i + 1; j < bonds_at_atom.size(); ++j) {
        const int a = std::min(bonds_at_atom[i], bonds_at_atom[j]);
        const int b = std::max(bonds_at_atom[i], bonds_at_atom[j]);
        lg.adjacency.emplace_back(a, b);
      }
    }
  }
  return lg;
}

}  // namespace ddikit::graph
