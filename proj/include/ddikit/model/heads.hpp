#pragma once

#include <vector>

#include "ddikit/model/encoder.hpp"

namespace ddikit::model {

/// Co-attention over the K scales of two aligned graph batches (row p of the
/// left batch pairs with row p of the right batch).
struct CoAttentionResult {
  core::Tensor h_i, h_j;          // fused embeddings [P x d]
  core::Tensor alpha_i, alpha_j;  // scale weights [P x K]
};

CoAttentionResult co_attention(const EncodeResult& left, const EncodeResult& right,
                               const ModelParams& params);

/// Bilinear relational score mu_p = h_i' M_r h_j per pair. Relation ids must
/// be < relation_count; with the relation module ablated every pair uses the
/// single shared matrix.
core::Tensor rescal_score(const core::Tensor& h_i, const core::Tensor& h_j,
                          const std::vector<int>& relation_ids, const ModelParams& params);

/// Two-layer MLP log-variance head on the concatenated pair embedding.
core::Tensor uncertainty_head(const core::Tensor& h_i, const core::Tensor& h_j,
                              const ModelParams& params);

}  // namespace ddikit::model
