#pragma once

#include <vector>

#include "ddikit/model/heads.hpp"

namespace ddikit::model {

/// Everything the loss needs from a forward pass over aligned pair batches.
struct ForwardResult {
  core::Tensor mu;                // [P x 1] interaction logits
  core::Tensor s;                 // [P x 1] log-variances
  core::Tensor alpha_i, alpha_j;  // [P x K]
  core::Tensor kl_i, kl_j;        // [G x 1] per-graph KL sums
  EncodeResult enc_i, enc_j;
};

ForwardResult forward_batch(ModelParams& params, const graph::GraphBatch& left,
                            const BatchInputs& left_in, const graph::GraphBatch& right,
                            const BatchInputs& right_in, const std::vector<int>& relations,
                            Mode mode, BnPolicy bn);

ForwardResult forward_batch(ModelParams& params, const graph::GraphBatch& left,
                            const graph::GraphBatch& right, const std::vector<int>& relations,
                            Mode mode);

/// Inference output for a single drug pair.
struct PredictionOutput {
  double mu = 0.0;
  double s = 0.0;
  double probability = 0.0;
  double variance = 0.0;
  std::vector<double> alpha_i, alpha_j;
};

/// Runs one pair through the full pipeline. Graphs must be featurized.
PredictionOutput forward_pair(ModelParams& params, const chem::MolecularGraph& drug_i,
                              const chem::MolecularGraph& drug_j, int relation, Mode mode,
                              std::uint64_t noise_seed = 0);

}  // namespace ddikit::model
