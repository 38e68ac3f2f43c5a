#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ddikit/core/tensor.hpp"

namespace ddikit::train {

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// AdamW over a fixed parameter list: Adam moment updates with bias
/// correction, then the decoupled decay theta <- theta - lr * wd * theta
/// applied separately from the gradient step.
class AdamW {
 public:
  explicit AdamW(std::vector<std::pair<std::string, core::Tensor>> params,
                 AdamWOptions opts = AdamWOptions());

  /// Applies one update from the gradients currently on the parameters.
  /// Throws on a non-finite gradient, naming the parameter.
  void step(double lr, double weight_decay);

  /// Multiplies every gradient in place (gradient-accumulation averaging).
  void scale_gradients(double factor);

  void zero_gradients();

  std::int64_t step_count() const { return step_count_; }

  /// Moment buffers in parameter order, for checkpointing.
  struct StateView {
    std::string name;
    const std::vector<double>* m;
    const std::vector<double>* v;
  };
  std::vector<StateView> state() const;
  void load_state(const std::string& name, std::vector<double> m, std::vector<double> v);
  void set_step_count(std::int64_t steps) { step_count_ = steps; }

 private:
  std::vector<std::pair<std::string, core::Tensor>> params_;
  std::vector<std::vector<double>> m_, v_;
  AdamWOptions opts_;
  std::int64_t step_count_ = 0;
};

/// Cosine annealing without restarts: base_lr * (1 + cos(pi * step / total)) / 2.
double cosine_lr(std::int64_t step, std::int64_t total_steps, double base_lr);

}  // namespace ddikit::train
