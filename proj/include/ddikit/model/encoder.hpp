#pragma once

#include <vector>

#include "ddikit/graph/batch.hpp"
#include "ddikit/model/params.hpp"

namespace ddikit::model {

enum class Mode { Train, Eval };

/// Batch-norm policy, decoupled from Mode so tests can freeze statistics
/// while keeping the sampling path live.
struct BnPolicy {
  bool use_batch_stats = false;
  bool update_running = false;

  static BnPolicy for_mode(Mode mode) { return {mode == Mode::Train, mode == Mode::Train}; }
  static BnPolicy frozen() { return {false, false}; }
};

/// Leaf tensors feeding the encoder; exposed so probes can differentiate
/// with respect to the raw features.
struct BatchInputs {
  core::Tensor node_features;  // [n_nodes x d_v]
  core::Tensor edge_features;  // [n_bonds x d_e]
};

BatchInputs make_inputs(const graph::GraphBatch& batch, bool requires_grad = false);

/// Multi-scale encoding of one graph batch: per scale the sampled (or mean)
/// embedding, the KL against the standard normal prior, the latent moments
/// and the final node states of that block.
struct EncodeResult {
  std::vector<core::Tensor> h;            // K x [G x d]
  std::vector<core::Tensor> kl;           // K x [G x 1]
  std::vector<core::Tensor> mu_z;         // K x [G x d]
  std::vector<core::Tensor> logvar_z;     // K x [G x d]
  std::vector<core::Tensor> node_states;  // K x [N x d]
  core::Tensor kl_total;                  // [G x 1], sum over scales
};

// Stage operations; encode_multiscale chains them.

/// x0 = PReLU(BatchNorm(node_proj(x))) per node; e0 = edge_proj(e) expanded
/// to arcs (the two arcs of a bond share its projection).
std::pair<core::Tensor, core::Tensor> project_features(const graph::GraphBatch& batch,
                                                       const BatchInputs& in, ModelParams& params,
                                                       BnPolicy bn);

/// Per arc: m_uv = e_uv + (x_u + x_v) / 2.
core::Tensor message_init(const core::Tensor& edge_states, const core::Tensor& node_states,
                          const graph::GraphBatch& batch);

/// m'_uv = m_uv + sum of messages on line-graph-neighbouring bonds.
core::Tensor message_aggregate(const core::Tensor& messages, const graph::GraphBatch& batch);

/// GRU update from the aggregated incoming messages.
core::Tensor node_update_gru(const core::Tensor& node_states, const core::Tensor& refined,
                             const graph::GraphBatch& batch, const BlockParams& block);

/// Attention-pooled per-graph summary (softmax-weighted node states).
core::Tensor attention_pool(const core::Tensor& node_states, const graph::GraphBatch& batch,
                            const BlockParams& block);

struct ReadoutResult {
  core::Tensor h;       // [G x d]
  core::Tensor kl;      // [G x 1]
  core::Tensor mu_z;    // [G x d]
  core::Tensor logvar;  // [G x d]
};

/// Gaussian readout: train mode draws h = mu + sigma * eps with per-graph
/// noise streams seeded from batch.noise_seed and the scale index; eval mode
/// returns the mean. Log-variance is clamped to [-10, 10].
ReadoutResult stochastic_readout(const core::Tensor& summary, const BlockParams& block, Mode mode,
                                 const graph::GraphBatch& batch, int scale_index);

EncodeResult encode_multiscale(const graph::GraphBatch& batch, const BatchInputs& in,
                               ModelParams& params, Mode mode, BnPolicy bn);

/// Convenience overload building constant inputs from the batch.
EncodeResult encode_multiscale(const graph::GraphBatch& batch, ModelParams& params, Mode mode);

}  // namespace ddikit::model
