#include "ddikit/model/params.hpp"

#include <cmath>
#include <stdexcept>

namespace ddikit::model {

using core::Tensor;

void ModelConfig::validate() const {
  if (scales < 1) throw std::invalid_argument("model config: scales (K) must be >= 1");
  if (iterations < 1) throw std::invalid_argument("model config: iterations (T) must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("model config: hidden_dim must be >= 1");
  if (relation_count < 1) throw std::invalid_argument("model config: relation_count must be >= 1");
  if (node_dim < 1 || edge_dim < 1) {
    throw std::invalid_argument("model config: feature dimensions must be >= 1");
  }
}

ModelParams::ModelParams(ModelConfig cfg) : config(cfg), bn_stats(cfg.hidden_dim) {
  config.validate();
  const std::int64_t d = config.hidden_dim;
  auto param = [](core::Shape shape) { return Tensor::zeros(std::move(shape), true); };

  node_proj_w = param({config.node_dim, d});
  node_proj_b = param({1, d});
  bn_gamma = Tensor::full({1, d}, 1.0, true);
  bn_beta = param({1, d});
  prelu_slope = Tensor::full({1, 1}, 0.25, true);
  edge_proj_w = param({config.edge_dim, d});
  edge_proj_b = param({1, d});

  blocks.resize(static_cast<std::size_t>(config.scales));
  for (auto& blk : blocks) {
    blk.gru_wz = param({d, d});
    blk.gru_uz = param({d, d});
    blk.gru_bz = param({1, d});
    blk.gru_wr = param({d, d});
    blk.gru_ur = param({d, d});
    blk.gru_br = param({1, d});
    blk.gru_wn = param({d, d});
    blk.gru_un = param({d, d});
    blk.gru_bn = param({1, d});
    blk.attn_w1 = param({d, d});
    blk.attn_w2 = param({d, 1});
    blk.mean_w = param({d, d});
    blk.mean_b = param({1, d});
    blk.logvar_w = param({d, d});
    blk.logvar_b = param({1, d});
  }

  coattn_w = param({d, d});
  const int n_rel = config.relation_module_enabled ? config.relation_count : 1;
  relation_m.reserve(static_cast<std::size_t>(n_rel));
  for (int r = 0; r < n_rel; ++r) relation_m.push_back(param({d, d}));

  unc_w1 = param({2 * d, d});
  unc_b1 = param({1, d});
  unc_slope = Tensor::full({1, 1}, 0.25, true);
  unc_w2 = param({d, 1});
  unc_b2 = param({1, 1});
}

namespace {

void xavier_fill(Tensor& t, core::RandomStream& rng) {
  const double fan_in = static_cast<double>(t.rows());
  const double fan_out = static_cast<double>(t.cols());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : t.values_mut()) v = rng.uniform(-limit, limit);
}

}  // namespace

void ModelParams::init(core::RandomStream& rng) {
  for (auto& [name, tensor] : named_parameters()) {
    Tensor t = tensor;
    if (name.ends_with("slope") || name.ends_with("bn.gamma")) continue;  // construction defaults
    if (t.rows() > 1) {
      xavier_fill(t, rng);
    } else {
      for (auto& v : t.values_mut()) v = 0.0;  // biases
    }
  }
}

std::vector<std::pair<std::string, Tensor>> ModelParams::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("encoder.node_proj.w", node_proj_w);
  out.emplace_back("encoder.node_proj.b", node_proj_b);
  out.emplace_back("encoder.bn.gamma", bn_gamma);
  out.emplace_back("encoder.bn.beta", bn_beta);
  out.emplace_back("encoder.prelu.slope", prelu_slope);
  out.emplace_back("encoder.edge_proj.w", edge_proj_w);
  out.emplace_back("encoder.edge_proj.b", edge_proj_b);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string base = "encoder.block" + std::to_string(k) + ".";
    const BlockParams& blk = blocks[k];
    out.emplace_back(base + "gru.wz", blk.gru_wz);
    out.emplace_back(base + "gru.uz", blk.gru_uz);
    out.emplace_back(base + "gru.bz", blk.gru_bz);
    out.emplace_back(base + "gru.wr", blk.gru_wr);
    out.emplace_back(base + "gru.ur", blk.gru_ur);
    out.emplace_back(base + "gru.br", blk.gru_br);
    out.emplace_back(base + "gru.wn", blk.gru_wn);
    out.emplace_back(base + "gru.un", blk.gru_un);
    out.emplace_back(base + "gru.bn", blk.gru_bn);
    out.emplace_back(base + "attn.w1", blk.attn_w1);
    out.emplace_back(base + "attn.w2", blk.attn_w2);
    out.emplace_back(base + "mean.w", blk.mean_w);
    out.emplace_back(base + "mean.b", blk.mean_b);
    out.emplace_back(base + "logvar.w", blk.logvar_w);
    out.emplace_back(base + "logvar.b", blk.logvar_b);
  }
  out.emplace_back("coattn.w", coattn_w);
  for (std::size_t r = 0; r < relation_m.size(); ++r) {
    out.emplace_back("rescal.m." + std::to_string(r), relation_m[r]);
  }
  out.emplace_back("unc.w1", unc_w1);
  out.emplace_back("unc.b1", unc_b1);
  out.emplace_back("unc.slope", unc_slope);
  out.emplace_back("unc.w2", unc_w2);
  out.emplace_back("unc.b2", unc_b2);
  return out;
}

std::vector<std::pair<std::string, std::vector<double>*>> ModelParams::named_buffers() {
  return {{"encoder.bn.running_mean", &bn_stats.running_mean},
          {"encoder.bn.running_var", &bn_stats.running_var}};
}

void ModelParams::zero_grad() {
  for (auto& [name, tensor] : named_parameters()) {
    Tensor t = tensor;
    t.zero_grad();
  }
}

}  // namespace ddikit::model
