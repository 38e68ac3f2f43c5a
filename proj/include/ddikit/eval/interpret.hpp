#pragma once

#include <vector>

#include "ddikit/model/model.hpp"

namespace ddikit::eval {

/// Pairwise Pearson correlations between atom embeddings of one molecule.
/// Atoms with a constant embedding get NaN rows/columns and a degenerate
/// flag; defined diagonal entries are exactly 1.
struct SimilarityMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // n x n row-major
  std::vector<bool> degenerate;

  double at(std::size_t a, std::size_t b) const { return values[a * n + b]; }
};

SimilarityMatrix atom_similarity_matrix(const core::Tensor& node_states);

/// Gradient attribution of the interaction logit onto the input atom
/// features: per-atom L2 norms of d(mu)/d(features), normalized to sum one
/// per molecule. A zero total gradient yields flagged uniform scores. Also
/// reports the highest-scoring atom and its bond neighbourhood of the given
/// radius.
struct AttributionSide {
  std::vector<double> scores;
  bool flagged_uniform = false;
  int top_atom = 0;
  std::vector<int> neighbourhood;  // top atom plus atoms within the radius
};

struct Attribution {
  AttributionSide left, right;
};

Attribution atom_attribution(model::ModelParams& params, const chem::MolecularGraph& drug_i,
                             const chem::MolecularGraph& drug_j, int relation, int radius = 1);

}  // namespace ddikit::eval
