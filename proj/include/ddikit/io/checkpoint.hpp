#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ddikit/io/run_config.hpp"
#include "ddikit/model/params.hpp"
#include "ddikit/train/adamw.hpp"

namespace ddikit::io {

/// Self-describing binary checkpoint: magic + version, the training
/// configuration snapshot, a named tensor table (shape + raw little-endian
/// 64-bit floats) covering parameters and batch-norm buffers, optional
/// optimizer moments and the trainer RNG state. A reader needs no external
/// configuration to enumerate the tensors.
struct Checkpoint {
  std::uint32_t version = 0;
  train::TrainConfig config;
  int relation_count = 1;
  std::vector<std::pair<std::string, core::Shape>> shapes;
  std::vector<std::pair<std::string, std::vector<double>>> tensors;
  bool has_optimizer = false;
  std::vector<std::tuple<std::string, std::vector<double>, std::vector<double>>> optimizer_state;
  std::int64_t optimizer_steps = 0;
  std::uint64_t rng_state = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes atomically (temporary file + rename).
void save_checkpoint(const std::string& path, model::ModelParams& params,
                     const train::TrainConfig& config, const train::AdamW* optimizer = nullptr,
                     std::uint64_t rng_state = 0);

Checkpoint load_checkpoint(const std::string& path);

/// Rebuilds a model from the checkpoint's own configuration.
model::ModelParams restore_model(const Checkpoint& ckpt);

/// Copies checkpoint tensors into an existing model; throws a shape-mismatch
/// error naming the offending tensor.
void apply_to_model(const Checkpoint& ckpt, model::ModelParams& params);

}  // namespace ddikit::io
