#pragma once

#include "ddikit/chem/molecule.hpp"

namespace ddikit::chem {

/// Node feature layout: one-hot element (10 vocabulary entries + other),
/// one-hot degree (0-5, clipped), one-hot formal charge (-2..+2, clipped),
/// one-hot hybridization class, aromatic flag.
inline constexpr int kElementBlock = static_cast<int>(kElementVocab.size()) + 1;
inline constexpr int kDegreeBlock = 6;
inline constexpr int kChargeBlock = 5;
inline constexpr int kHybridizationBlock = 4;
inline constexpr int kNodeFeatureDim =
    kElementBlock + kDegreeBlock + kChargeBlock + kHybridizationBlock + 1;

/// Edge feature layout: one-hot bond order (single, double, triple,
/// aromatic) plus the ring-membership flag.
inline constexpr int kEdgeFeatureDim = 5;

/// Fills node_features and edge_features in place.
void featurize_graph(MolecularGraph& g);

}  // namespace ddikit::chem
