#include "ddikit/train/adamw.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddikit::train {

AdamW::AdamW(std::vector<std::pair<std::string, core::Tensor>> params, AdamWOptions opts)
    : params_(std::move(params)), opts_(opts) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& [name, t] : params_) {
    m_.emplace_back(static_cast<std::size_t>(t.size()), 0.0);
    v_.emplace_back(static_cast<std::size_t>(t.size()), 0.0);
  }
}

void AdamW::step(double lr, double weight_decay) {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(step_count_));

  for (std::size_t p = 0; p < params_.size(); ++p) {
    core::Tensor t = params_[p].second;
    auto values = t.values_mut();
    auto grad = t.grad_mut();  // zeros if backward never touched this leaf
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i];
      if (!std::isfinite(g)) {
        throw std::runtime_error("adamw: non-finite gradient in parameter " + params_[p].first +
                                 " at element " + std::to_string(i));
      }
      m[i] = opts_.beta1 * m[i] + (1.0 - opts_.beta1) * g;
      v[i] = opts_.beta2 * v[i] + (1.0 - opts_.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      values[i] -= lr * m_hat / (std::sqrt(v_hat) + opts_.eps);
      values[i] -= lr * weight_decay * values[i];
    }
  }
}

void AdamW::scale_gradients(double factor) {
  for (auto& [name, tensor] : params_) {
    core::Tensor t = tensor;
    if (!t.has_grad()) continue;
    for (auto& g : t.grad_mut()) g *= factor;
  }
}

void AdamW::zero_gradients() {
  for (auto& [name, tensor] : params_) {
    core::Tensor t = tensor;
    t.zero_grad();
  }
}

std::vector<AdamW::StateView> AdamW::state() const {
  std::vector<StateView> out;
  out.reserve(params_.size());
  for (std::size_t p = 0; p < params_.size(); ++p) {
    out.push_back({params_[p].first, &m_[p], &v_[p]});
  }
  return out;
}

void AdamW::load_state(const std::string& name, std::vector<double> m, std::vector<double> v) {
  for (std::size_t p = 0; p < params_.size(); ++p) {
    if (params_[p].first != name) continue;
    if (m.size() != m_[p].size() || v.size() != v_[p].size()) {
      throw std::runtime_error("adamw: state size mismatch for " + name);
    }
    m_[p] = std::move(m);
    v_[p] = std::move(v);
    return;
  }
  throw std::runtime_error("adamw: unknown parameter " + name);
}

double cosine_lr(std::int64_t step, std::int64_t total_steps, double base_lr) {
  if (total_steps <= 0) throw std::invalid_argument("cosine_lr: total_steps must be positive");
  if (step < 0 || step > total_steps) {
    throw std::invalid_argument("cosine_lr: step out of [0, total_steps]");
  }
  const double phase = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * phase));
}

}  // namespace ddikit::train
