#include "ddikit/graph/batch.hpp"

#include <stdexcept>
#include <string>

namespace ddikit::graph {

GraphBatch batch_graphs(const std::vector<const chem::MolecularGraph*>& graphs,
                        std::int64_t node_dim, std::int64_t edge_dim) {
  if (graphs.empty()) throw std::invalid_argument("batch_graphs: empty graph list");

  GraphBatch batch;
  batch.n_graphs = static_cast<std::int64_t>(graphs.size());
  batch.node_dim = node_dim;
  batch.edge_dim = edge_dim;
  batch.node_offset.push_back(0);
  batch.bond_offset.push_back(0);

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const chem::MolecularGraph& g = *graphs[gi];
    const auto nodes = static_cast<std::int64_t>(g.atoms.size());
    const auto bonds = static_cast<std::int64_t>(g.bonds.size());
    if (static_cast<std::int64_t>(g.node_features.size()) != nodes * node_dim ||
        static_cast<std::int64_t>(g.edge_features.size()) != bonds * edge_dim) {
      throw std::invalid_argument("batch_graphs: graph " + std::to_string(gi) +
                                  " feature dimensions do not match the batch");
    }

    const std::int64_t node_base = batch.n_nodes;
    const std::int64_t bond_base = batch.n_bonds;
    batch.node_features.insert(batch.node_features.end(), g.node_features.begin(),
                               g.node_features.end());
    batch.edge_features.insert(batch.edge_features.end(), g.edge_features.begin(),
                               g.edge_features.end());
    for (std::int64_t i = 0; i < nodes; ++i) {
      batch.membership.push_back(static_cast<std::int64_t>(gi));
    }

    for (std::int64_t b = 0; b < bonds; ++b) {
      const auto& bond = g.bonds[static_cast<std::size_t>(b)];
      const std::int64_t u = node_base + bond.u;
      const std::int64_t v = node_base + bond.v;
      batch.arc_src.push_back(u);
      batch.arc_dst.push_back(v);
      batch.arc_bond.push_back(bond_base + b);
      batch.arc_src.push_back(v);
      batch.arc_dst.push_back(u);
      batch.arc_bond.push_back(bond_base + b);
    }

    const LineGraph lg = build_line_graph(g);
    for (const auto& [a, b] : lg.adjacency) {
      const std::int64_t arc_a = 2 * (bond_base + a);
      const std::int64_t arc_b = 2 * (bond_base + b);
      // b's message into both arcs of a, and a's into both arcs of b.
      batch.lg_gather.push_back(arc_b);
      batch.lg_scatter.push_back(arc_a);
      batch.lg_gather.push_back(arc_b);
      batch.lg_scatter.push_back(arc_a + 1);
      batch.lg_gather.push_back(arc_a);
      batch.lg_scatter.push_back(arc_b);
      batch.lg_gather.push_back(arc_a);
      batch.lg_scatter.push_back(arc_b + 1);
    }

    batch.n_nodes += nodes;
    batch.n_bonds += bonds;
    batch.node_offset.push_back(batch.n_nodes);
    batch.bond_offset.push_back(batch.n_bonds);
  }

  batch.n_arcs = 2 * batch.n_bonds;
  batch.noise_seed.assign(static_cast<std::size_t>(batch.n_graphs), 0);
  return batch;
}

GraphBatch batch_single(const chem::MolecularGraph& g, std::int64_t node_dim,
                        std::int64_t edge_dim) {
  return batch_graphs({&g}, node_dim, edge_dim);
}

}  // namespace ddikit::graph
