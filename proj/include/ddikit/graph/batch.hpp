#pragma once

#include <cstdint>
#include <vector>

#include "ddikit/chem/molecule.hpp"
#include "ddikit/graph/line_graph.hpp"

namespace ddikit::graph {

/// Several molecules packed into one index space for vectorized message
/// passing. Bonds are doubled into directed arcs (u->v, v->u) sharing one
/// bond record; arcs of bond i are 2i and 2i+1, so the canonical arc of a
/// bond is even. Line-graph neighbourhoods are pre-expanded into a
/// gather/scatter index pair over arcs.
struct GraphBatch {
  std::int64_t n_graphs = 0;
  std::int64_t n_nodes = 0;
  std::int64_t n_bonds = 0;
  std::int64_t n_arcs = 0;
  std::int64_t node_dim = 0;
  std::int64_t edge_dim = 0;

  std::vector<double> node_features;  // n_nodes x node_dim
  std::vector<double> edge_features;  // n_bonds x edge_dim

  std::vector<std::int64_t> membership;   // node -> graph id
  std::vector<std::int64_t> node_offset;  // size n_graphs + 1
  std::vector<std::int64_t> bond_offset;  // size n_graphs + 1

  std::vector<std::int64_t> arc_src;   // per arc: source atom (global id)
  std::vector<std::int64_t> arc_dst;   // per arc: target atom
  std::vector<std::int64_t> arc_bond;  // per arc: owning bond

  // For each line edge (a, b), the canonical arc of b feeds both arcs of a
  // and vice versa.
  std::vector<std::int64_t> lg_gather;   // source arcs
  std::vector<std::int64_t> lg_scatter;  // destination arcs

  // Per-graph seeds for the stochastic readout; filled by the caller when
  // sampling is wanted.
  std::vector<std::uint64_t> noise_seed;
};

/// Packs featurized molecules. All node/edge feature matrices must match the
/// given dimensions; anything else is rejected.
GraphBatch batch_graphs(const std::vector<const chem::MolecularGraph*>& graphs,
                        std::int64_t node_dim, std::int64_t edge_dim);

GraphBatch batch_single(const chem::MolecularGraph& g, std::int64_t node_dim,
                        std::int64_t edge_dim);

}  // namespace ddikit::graph
