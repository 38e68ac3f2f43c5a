#include "ddikit/model/encoder.hpp"

#include <cmath>
#include <stdexcept>

namespace ddikit::model {

using core::Tensor;
namespace ops = ddikit::core;

BatchInputs make_inputs(const graph::GraphBatch& batch, bool requires_grad) {
  BatchInputs in;
  in.node_features = Tensor::from_values({batch.n_nodes, batch.node_dim}, batch.node_features,
                                         requires_grad);
  in.edge_features = Tensor::from_values({batch.n_bonds, batch.edge_dim}, batch.edge_features,
                                         requires_grad);
  return in;
}

std::pair<Tensor, Tensor> project_features(const graph::GraphBatch& batch, const BatchInputs& in,
                                           ModelParams& params, BnPolicy bn) {
  Tensor projected = ops::add_rowvec(ops::matmul(in.node_features, params.node_proj_w),
                                     params.node_proj_b);
  Tensor normalized = ops::batchnorm(projected, params.bn_gamma, params.bn_beta, params.bn_stats,
                                     bn.use_batch_stats, bn.update_running);
  Tensor x0 = ops::prelu(normalized, params.prelu_slope);
  Tensor e_bond = ops::add_rowvec(ops::matmul(in.edge_features, params.edge_proj_w),
                                  params.edge_proj_b);
  // Edge states live per arc; the two arcs of a bond share its projection.
  Tensor e0 = ops::gather_rows(e_bond, batch.arc_bond);
  return {x0, e0};
}

Tensor message_init(const Tensor& edge_states, const Tensor& node_states,
                    const graph::GraphBatch& batch) {
  Tensor x_u = ops::gather_rows(node_states, batch.arc_src);
  Tensor x_v = ops::gather_rows(node_states, batch.arc_dst);
  return ops::add(edge_states, ops::scale(ops::add(x_u, x_v), 0.5));
}

Tensor message_aggregate(const Tensor& messages, const graph::GraphBatch& batch) {
  Tensor neighbour_sum = ops::scatter_sum(ops::gather_rows(messages, batch.lg_gather),
                                          batch.lg_scatter, batch.n_arcs);
  return ops::add(messages, neighbour_sum);
}

Tensor node_update_gru(const Tensor& node_states, const Tensor& refined,
                       const graph::GraphBatch& batch, const BlockParams& block) {
  Tensor delta = ops::scatter_sum(refined, batch.arc_dst, batch.n_nodes);
  Tensor z = ops::sigmoid(ops::add_rowvec(
      ops::add(ops::matmul(delta, block.gru_wz), ops::matmul(node_states, block.gru_uz)),
      block.gru_bz));
  Tensor r = ops::sigmoid(ops::add_rowvec(
      ops::add(ops::matmul(delta, block.gru_wr), ops::matmul(node_states, block.gru_ur)),
      block.gru_br));
  Tensor candidate = ops::tanh_op(ops::add_rowvec(
      ops::add(ops::matmul(delta, block.gru_wn), ops::mul(r, ops::matmul(node_states, block.gru_un))),
      block.gru_bn));
  // (1 - z) * n + z * x, written without a ones tensor.
  return ops::add(ops::sub(candidate, ops::mul(z, candidate)), ops::mul(z, node_states));
}

Tensor attention_pool(const Tensor& node_states, const graph::GraphBatch& batch,
                      const BlockParams& block) {
  Tensor scores = ops::matmul(ops::tanh_op(ops::matmul(node_states, block.attn_w1)),
                              block.attn_w2);
  Tensor weights = ops::segment_softmax(scores, batch.membership, batch.n_graphs);
  return ops::scatter_sum(ops::mul_colvec(node_states, weights), batch.membership,
                          batch.n_graphs);
}

ReadoutResult stochastic_readout(const Tensor& summary, const BlockParams& block, Mode mode,
                                 const graph::GraphBatch& batch, int scale_index) {
  ReadoutResult out;
  out.mu_z = ops::add_rowvec(ops::matmul(summary, block.mean_w), block.mean_b);
  out.logvar = ops::clamp(
      ops::add_rowvec(ops::matmul(summary, block.logvar_w), block.logvar_b), -10.0, 10.0);

  for (double v : out.mu_z.values()) {
    if (!std::isfinite(v)) throw std::runtime_error("stochastic_readout: non-finite latent mean");
  }

  if (mode == Mode::Train) {
    const std::int64_t d = out.mu_z.cols();
    std::vector<double> eps(static_cast<std::size_t>(batch.n_graphs * d));
    for (std::int64_t g = 0; g < batch.n_graphs; ++g) {
      core::RandomStream noise(core::seed_mix(batch.noise_seed[static_cast<std::size_t>(g)],
                                              static_cast<std::uint64_t>(scale_index)));
      for (std::int64_t j = 0; j < d; ++j) eps[g * d + j] = noise.normal();
    }
    Tensor eps_t = Tensor::from_values({batch.n_graphs, d}, std::move(eps));
    Tensor sigma = ops::exp_op(ops::scale(out.logvar, 0.5));
    out.h = ops::add(out.mu_z, ops::mul(sigma, eps_t));
  } else {
    out.h = out.mu_z;
  }

  // KL(q || N(0, I)) = 0.5 * sum(mu^2 + sigma^2 - 1 - log sigma^2).
  Tensor inner = ops::sub(ops::add(ops::square(out.mu_z), ops::exp_op(out.logvar)),
                          ops::add_scalar(out.logvar, 1.0));
  out.kl = ops::scale(ops::sum_axis(inner, 1), 0.5);
  return out;
}

EncodeResult encode_multiscale(const graph::GraphBatch& batch, const BatchInputs& in,
                               ModelParams& params, Mode mode, BnPolicy bn) {
  params.config.validate();
  auto [x, e] = project_features(batch, in, params, bn);

  EncodeResult result;
  for (int k = 0; k < params.config.scales; ++k) {
    const BlockParams& block = params.blocks[static_cast<std::size_t>(k)];
    for (int t = 0; t < params.config.iterations; ++t) {
      Tensor refined = message_aggregate(message_init(e, x, batch), batch);
      x = node_update_gru(x, refined, batch, block);
    }
    Tensor summary = attention_pool(x, batch, block);
    ReadoutResult readout = stochastic_readout(summary, block, mode, batch, k);
    result.h.push_back(readout.h);
    result.kl.push_back(readout.kl);
    result.mu_z.push_back(readout.mu_z);
    result.logvar_z.push_back(readout.logvar);
    result.node_states.push_back(x);
  }

  result.kl_total = result.kl[0];
  for (std::size_t k = 1; k < result.kl.size(); ++k) {
    result.kl_total = ops::add(result.kl_total, result.kl[k]);
  }
  return result;
}

EncodeResult encode_multiscale(const graph::GraphBatch& batch, ModelParams& params, Mode mode) {
  return encode_multiscale(batch, make_inputs(batch), params, mode, BnPolicy::for_mode(mode));
}

}  // namespace ddikit::model
