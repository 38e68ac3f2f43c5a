#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddikit/data/pairs.hpp"
#include "ddikit/model/model.hpp"
#include "ddikit/train/adamw.hpp"
#include "ddikit/train/loss.hpp"

namespace ddikit::train {

struct TrainConfig {
  int scales = 3;                 // K
  int iterations = 2;             // T
  std::int64_t hidden_dim = 32;   // d_h
  double learning_rate = 1e-4;
  double weight_decay = 5e-4;
  int epochs = 20;
  int batch_size = 8;
  int accumulation_steps = 4;
  double lambda_unc = 0.1;
  double lambda_kl = 0.01;
  std::uint64_t seed = 0;
  bool relation_module_enabled = true;
  bool uncertainty_on_scale_means = false;
  // Normalize by the (initial) running statistics throughout training; used
  // by the gradient-accumulation equivalence check.
  bool freeze_batchnorm = false;

  void validate() const;
  model::ModelConfig model_config(int relation_count) const;
};

struct EpochLog {
  int epoch = 0;
  LossBreakdown loss;
  double lr = 0.0;
};

struct FitResult {
  model::ModelParams params;
  std::vector<EpochLog> log;
  std::int64_t optimizer_steps = 0;
};

/// Runs the training loop over the selected pairs: forward, composite loss,
/// backward, an AdamW step on the averaged gradient every
/// accumulation_steps batches, cosine annealing per optimizer step. Noise
/// streams are derived per (epoch, example), so the parameter trajectory is
/// independent of how examples are cut into batches. Aborts on a non-finite
/// loss, naming the batch.
///
/// max_optimizer_steps, when set, stops early after that many updates.
FitResult fit(const data::PairDataset& data, const std::vector<std::size_t>& pair_indices,
              const TrainConfig& cfg,
              std::optional<std::int64_t> max_optimizer_steps = std::nullopt);

/// One evaluation-mode forward over the given pairs; returns per-pair
/// predictions in input order.
struct BatchPrediction {
  std::vector<double> mu, s, probability, variance;
};
BatchPrediction predict(model::ModelParams& params, const data::PairDataset& data,
                        const std::vector<std::size_t>& pair_indices, int batch_size = 64);

/// Mean evaluation-mode prediction loss (BCE) over the given pairs.
double eval_bce(model::ModelParams& params, const data::PairDataset& data,
                const std::vector<std::size_t>& pair_indices);

/// Per-pair argmax over all relation scores (the multi-class decision rule);
/// the pair's own relation id is ignored.
std::vector<int> predict_relation_argmax(model::ModelParams& params,
                                         const data::PairDataset& data,
                                         const std::vector<std::size_t>& pair_indices,
                                         int batch_size = 64);

}  // namespace ddikit::train
