#include "ddikit/model/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ddikit::model {

using core::Tensor;
namespace ops = ddikit::core;

ForwardResult forward_batch(ModelParams& params, const graph::GraphBatch& left,
                            const BatchInputs& left_in, const graph::GraphBatch& right,
                            const BatchInputs& right_in, const std::vector<int>& relations,
                            Mode mode, BnPolicy bn) {
  ForwardResult out;
  out.enc_i = encode_multiscale(left, left_in, params, mode, bn);
  out.enc_j = encode_multiscale(right, right_in, params, mode, bn);

  CoAttentionResult fused = co_attention(out.enc_i, out.enc_j, params);
  out.alpha_i = fused.alpha_i;
  out.alpha_j = fused.alpha_j;
  out.mu = rescal_score(fused.h_i, fused.h_j, relations, params);

  if (params.config.uncertainty_on_scale_means) {
    const double inv_k = 1.0 / static_cast<double>(params.config.scales);
    Tensor mean_i = out.enc_i.h[0];
    Tensor mean_j = out.enc_j.h[0];
    for (int k = 1; k < params.config.scales; ++k) {
      mean_i = ops::add(mean_i, out.enc_i.h[static_cast<std::size_t>(k)]);
      mean_j = ops::add(mean_j, out.enc_j.h[static_cast<std::size_t>(k)]);
    }
    out.s = uncertainty_head(ops::scale(mean_i, inv_k), ops::scale(mean_j, inv_k), params);
  } else {
    out.s = uncertainty_head(fused.h_i, fused.h_j, params);
  }

  out.kl_i = out.enc_i.kl_total;
  out.kl_j = out.enc_j.kl_total;
  return out;
}

ForwardResult forward_batch(ModelParams& params, const graph::GraphBatch& left,
                            const graph::GraphBatch& right, const std::vector<int>& relations,
                            Mode mode) {
  return forward_batch(params, left, make_inputs(left), right, make_inputs(right), relations,
                       mode, BnPolicy::for_mode(mode));
}

PredictionOutput forward_pair(ModelParams& params, const chem::MolecularGraph& drug_i,
                              const chem::MolecularGraph& drug_j, int relation, Mode mode,
                              std::uint64_t noise_seed) {
  if (!drug_i.featurized() || !drug_j.featurized()) {
    throw std::invalid_argument("forward_pair: graphs must be featurized first");
  }
  auto left = graph::batch_single(drug_i, params.config.node_dim, params.config.edge_dim);
  auto right = graph::batch_single(drug_j, params.config.node_dim, params.config.edge_dim);
  left.noise_seed[0] = core::seed_mix(noise_seed, 1);
  right.noise_seed[0] = core::seed_mix(noise_seed, 2);

  ForwardResult fwd = forward_batch(params, left, right, {relation}, mode);

  PredictionOutput out;
  out.mu = fwd.mu.item();
  out.s = fwd.s.item();
  out.probability = 1.0 / (1.0 + std::exp(-out.mu));
  out.variance = std::exp(out.s);
  out.alpha_i.assign(fwd.alpha_i.values().begin(), fwd.alpha_i.values().end());
  out.alpha_j.assign(fwd.alpha_j.values().begin(), fwd.alpha_j.values().end());
  return out;
}

}  // namespace ddikit::model
