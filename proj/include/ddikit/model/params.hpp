#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddikit/chem/featurize.hpp"
#include "ddikit/core/ops.hpp"
#include "ddikit/core/random.hpp"
#include "ddikit/core/tensor.hpp"

namespace ddikit::model {

/// Architecture configuration (the model slice of the training config).
struct ModelConfig {
  int scales = 3;          // stacked blocks (K)
  int iterations = 2;      // message-passing rounds per block (T)
  std::int64_t hidden_dim = 32;
  std::int64_t node_dim = chem::kNodeFeatureDim;
  std::int64_t edge_dim = chem::kEdgeFeatureDim;
  int relation_count = 1;
  bool relation_module_enabled = true;
  // Feeds the uncertainty head with per-scale means instead of the fused
  // embeddings (kept as a switch; fused embeddings are the default).
  bool uncertainty_on_scale_means = false;

  void validate() const;
};

/// One encoder block: GRU node update, attention pooling and the Gaussian
/// readout heads.
struct BlockParams {
  core::Tensor gru_wz, gru_uz, gru_bz;
  core::Tensor gru_wr, gru_ur, gru_br;
  core::Tensor gru_wn, gru_un, gru_bn;
  core::Tensor attn_w1, attn_w2;
  core::Tensor mean_w, mean_b;
  core::Tensor logvar_w, logvar_b;
};

struct ModelParams {
  ModelConfig config;

  // Feature projections (Eq. 5 stage).
  core::Tensor node_proj_w, node_proj_b;
  core::Tensor bn_gamma, bn_beta;
  core::BatchNormStats bn_stats;
  core::Tensor prelu_slope;
  core::Tensor edge_proj_w, edge_proj_b;

  std::vector<BlockParams> blocks;

  // Pair interaction.
  core::Tensor coattn_w;
  std::vector<core::Tensor> relation_m;  // one per relation; single shared when ablated
  core::Tensor unc_w1, unc_b1, unc_slope, unc_w2, unc_b2;

  explicit ModelParams(ModelConfig cfg);

  /// Xavier-uniform weights, zero biases, PReLU slopes 0.25.
  void init(core::RandomStream& rng);

  /// Stable creation-order listing; the optimizer, checkpoints and gradient
  /// bookkeeping all iterate this.
  std::vector<std::pair<std::string, core::Tensor>> named_parameters() const;

  /// Non-learnable state (batch-norm running statistics).
  std::vector<std::pair<std::string, std::vector<double>*>> named_buffers();

  void zero_grad();
};

}  // namespace ddikit::model
