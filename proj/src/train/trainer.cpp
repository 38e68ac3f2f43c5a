#include "ddikit/train/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ddikit::train {

using core::Tensor;
namespace ops = ddikit::core;

void TrainConfig::validate() const {
  if (scales < 1 || iterations < 1 || hidden_dim < 1) {
    throw std::invalid_argument("train config: K, T and d_h must be >= 1");
  }
  if (learning_rate <= 0 || weight_decay < 0) {
    throw std::invalid_argument("train config: learning_rate must be > 0, weight_decay >= 0");
  }
  if (epochs < 1 || batch_size < 1 || accumulation_steps < 1) {
    throw std::invalid_argument(
        "train config: epochs, batch_size and accumulation_steps must be >= 1");
  }
  if (lambda_unc < 0 || lambda_kl < 0) {
    throw std::invalid_argument("train config: loss weights must be >= 0");
  }
}

model::ModelConfig TrainConfig::model_config(int relation_count) const {
  model::ModelConfig mc;
  mc.scales = scales;
  mc.iterations = iterations;
  mc.hidden_dim = hidden_dim;
  mc.relation_count = relation_count;
  mc.relation_module_enabled = relation_module_enabled;
  mc.uncertainty_on_scale_means = uncertainty_on_scale_means;
  return mc;
}

namespace {

struct PairBatch {
  graph::GraphBatch left, right;
  std::vector<int> relations;
  Tensor labels;  // [P x 1]
};

PairBatch assemble(const data::PairDataset& data, const std::vector<std::size_t>& order,
                   std::size_t begin, std::size_t end, const TrainConfig& cfg, int epoch) {
  std::vector<const chem::MolecularGraph*> left_graphs, right_graphs;
  std::vector<int> relations;
  std::vector<double> labels;
  for (std::size_t p = begin; p < end; ++p) {
    const auto& ex = data.pairs[order[p]];
    left_graphs.push_back(&data.molecules[static_cast<std::size_t>(ex.i)]);
    right_graphs.push_back(&data.molecules[static_cast<std::size_t>(ex.j)]);
    relations.push_back(ex.relation);
    labels.push_back(static_cast<double>(ex.label));
  }
  PairBatch batch{
      graph::batch_graphs(left_graphs, chem::kNodeFeatureDim, chem::kEdgeFeatureDim),
      graph::batch_graphs(right_graphs, chem::kNodeFeatureDim, chem::kEdgeFeatureDim),
      std::move(relations),
      Tensor::from_values({static_cast<std::int64_t>(end - begin), 1}, std::move(labels))};
  // Noise depends on (seed, epoch, position in the epoch order, side) only,
  // never on batch boundaries.
  for (std::size_t p = begin; p < end; ++p) {
    const auto row = p - begin;
    batch.left.noise_seed[row] = core::seed_mix(cfg.seed, static_cast<std::uint64_t>(epoch),
                                                static_cast<std::uint64_t>(p), 0);
    batch.right.noise_seed[row] = core::seed_mix(cfg.seed, static_cast<std::uint64_t>(epoch),
                                                 static_cast<std::uint64_t>(p), 1);
  }
  return batch;
}

}  // namespace

FitResult fit(const data::PairDataset& data, const std::vector<std::size_t>& pair_indices,
              const TrainConfig& cfg, std::optional<std::int64_t> max_optimizer_steps) {
  cfg.validate();
  if (pair_indices.empty()) throw std::invalid_argument("fit: no training pairs");
  for (std::size_t idx : pair_indices) {
    if (idx >= data.pairs.size()) throw std::invalid_argument("fit: pair index out of range");
  }

  model::ModelParams params(cfg.model_config(data.relation_count));
  core::RandomStream init_rng(core::seed_mix(cfg.seed, 0xddf1));
  params.init(init_rng);

  AdamW optimizer(params.named_parameters());
  const std::size_t n = pair_indices.size();
  const std::int64_t batches_per_epoch =
      static_cast<std::int64_t>((n + cfg.batch_size - 1) / cfg.batch_size);
  const std::int64_t groups_per_epoch =
      (batches_per_epoch + cfg.accumulation_steps - 1) / cfg.accumulation_steps;
  std::int64_t total_steps = static_cast<std::int64_t>(cfg.epochs) * groups_per_epoch;
  if (max_optimizer_steps) total_steps = std::min(total_steps, *max_optimizer_steps);

  const model::BnPolicy train_bn =
      cfg.freeze_batchnorm ? model::BnPolicy::frozen() : model::BnPolicy::for_mode(model::Mode::Train);

  FitResult result{std::move(params), {}, 0};
  bool done = false;

  for (int epoch = 0; epoch < cfg.epochs && !done; ++epoch) {
    core::RandomStream shuffle_rng(core::seed_mix(cfg.seed, 0x5f0e, static_cast<std::uint64_t>(epoch)));
    std::vector<std::size_t> order(n);
    {
      auto perm = shuffle_rng.permutation(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = pair_indices[perm[i]];
    }

    double ep_pred = 0, ep_unc = 0, ep_kl = 0, ep_total = 0;
    std::size_t ep_examples = 0;
    int group_batches = 0;
    double current_lr = cosine_lr(result.optimizer_steps, total_steps, cfg.learning_rate);

    for (std::int64_t b = 0; b < batches_per_epoch && !done; ++b) {
      const std::size_t begin = static_cast<std::size_t>(b) * cfg.batch_size;
      const std::size_t end = std::min(begin + cfg.batch_size, n);
      PairBatch batch = assemble(data, order, begin, end, cfg, epoch);

      auto fwd = model::forward_batch(result.params, batch.left, model::make_inputs(batch.left),
                                      batch.right, model::make_inputs(batch.right),
                                      batch.relations, model::Mode::Train, train_bn);
      Tensor pred = bce_with_logits(fwd.mu, batch.labels);
      Tensor unc = uncertainty_loss(fwd.mu, fwd.s, batch.labels);
      Tensor kl = ops::add(ops::mean_all(fwd.kl_i), ops::mean_all(fwd.kl_j));
      LossTensors loss = total_loss(pred, unc, kl, cfg.lambda_unc, cfg.lambda_kl);

      const LossBreakdown lb = loss.values();
      if (!std::isfinite(lb.total)) {
        throw std::runtime_error("fit: non-finite loss at epoch " + std::to_string(epoch) +
                                 " batch " + std::to_string(b));
      }
      const auto batch_n = static_cast<double>(end - begin);
      ep_pred += lb.pred * batch_n;
      ep_unc += lb.unc * batch_n;
      ep_kl += lb.kl * batch_n;
      ep_total += lb.total * batch_n;
      ep_examples += end - begin;

      loss.total.backward();
      ++group_batches;

      const bool group_full = group_batches == cfg.accumulation_steps;
      const bool epoch_end = b + 1 == batches_per_epoch;
      if (group_full || epoch_end) {
        optimizer.scale_gradients(1.0 / static_cast<double>(group_batches));
        current_lr = cosine_lr(result.optimizer_steps, total_steps, cfg.learning_rate);
        optimizer.step(current_lr, cfg.weight_decay);
        optimizer.zero_gradients();
        group_batches = 0;
        ++result.optimizer_steps;
        if (max_optimizer_steps && result.optimizer_steps >= *max_optimizer_steps) done = true;
      }
    }

    EpochLog log;
    log.epoch = epoch;
    const auto denom = static_cast<double>(ep_examples);
    log.loss = {ep_pred / denom, ep_unc / denom, ep_kl / denom, ep_total / denom};
    log.lr = current_lr;
    result.log.push_back(log);
  }
  return result;
}

BatchPrediction predict(model::ModelParams& params, const data::PairDataset& data,
                        const std::vector<std::size_t>& pair_indices, int batch_size) {
  BatchPrediction out;
  TrainConfig probe;  // only used for noise-seed plumbing in assemble()
  probe.seed = 0;
  for (std::size_t begin = 0; begin < pair_indices.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(begin + static_cast<std::size_t>(batch_size), pair_indices.size());
    PairBatch batch = assemble(data, pair_indices, begin, end, probe, 0);
    auto fwd = model::forward_batch(params, batch.left, batch.right, batch.relations,
                                    model::Mode::Eval);
    for (std::int64_t p = 0; p < fwd.mu.rows(); ++p) {
      const double mu = fwd.mu.values()[p];
      const double s = fwd.s.values()[p];
      out.mu.push_back(mu);
      out.s.push_back(s);
      out.probability.push_back(1.0 / (1.0 + std::exp(-mu)));
      out.variance.push_back(std::exp(s));
    }
  }
  return out;
}

std::vector<int> predict_relation_argmax(model::ModelParams& params,
                                         const data::PairDataset& data,
                                         const std::vector<std::size_t>& pair_indices,
                                         int batch_size) {
  std::vector<int> out;
  TrainConfig probe;
  for (std::size_t begin = 0; begin < pair_indices.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(begin + static_cast<std::size_t>(batch_size), pair_indices.size());
    PairBatch batch = assemble(data, pair_indices, begin, end, probe, 0);
    // Encode and fuse once; only the bilinear scorer depends on the relation.
    auto enc_i = model::encode_multiscale(batch.left, params, model::Mode::Eval);
    auto enc_j = model::encode_multiscale(batch.right, params, model::Mode::Eval);
    auto fused = model::co_attention(enc_i, enc_j, params);
    const std::int64_t pairs = fused.h_i.rows();
    std::vector<int> best(static_cast<std::size_t>(pairs), 0);
    std::vector<double> best_mu(static_cast<std::size_t>(pairs), 0.0);
    for (int r = 0; r < params.config.relation_count; ++r) {
      auto mu = model::rescal_score(fused.h_i, fused.h_j,
                                    std::vector<int>(static_cast<std::size_t>(pairs), r), params);
      for (std::int64_t p = 0; p < pairs; ++p) {
        const double v = mu.values()[p];
        if (r == 0 || v > best_mu[static_cast<std::size_t>(p)]) {
          best_mu[static_cast<std::size_t>(p)] = v;
          best[static_cast<std::size_t>(p)] = r;
        }
      }
    }
    out.insert(out.end(), best.begin(), best.end());
  }
  return out;
}

double eval_bce(model::ModelParams& params, const data::PairDataset& data,
                const std::vector<std::size_t>& pair_indices) {
  BatchPrediction preds = predict(params, data, pair_indices);
  double total = 0.0;
  for (std::size_t k = 0; k < pair_indices.size(); ++k) {
    const double mu = preds.mu[k];
    const double y = static_cast<double>(data.pairs[pair_indices[k]].label);
    total += std::max(mu, 0.0) - y * mu + std::log1p(std::exp(-std::abs(mu)));
  }
  return total / static_cast<double>(pair_indices.size());
}

}  // namespace ddikit::train
