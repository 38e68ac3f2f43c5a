#pragma once

#include <string>

#include "ddikit/train/trainer.hpp"

namespace ddikit::io {

/// Flat key = value run configuration: the training hyperparameters plus
/// dataset paths, split options and metric options. Unknown keys are
/// rejected.
struct RunConfig {
  train::TrainConfig train;

  std::string drugs_path;
  std::string pairs_path;
  std::string split_mode = "transductive";  // transductive | inductive
  double train_ratio = 0.8;
  double valid_ratio = 0.1;
  double test_ratio = 0.1;
  double drug_ratio = 0.8;      // inductive drug share
  double negative_ratio = 1.0;  // 0 disables negative sampling
  double threshold = 0.5;
  std::string checkpoint_path = "model.ckpt";
  std::string loss_log_path = "loss_log.tsv";
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text);
std::string run_config_to_text(const RunConfig& cfg);

/// Checks that input paths exist before any work starts.
void validate_input_paths(const RunConfig& cfg);

}  // namespace ddikit::io
