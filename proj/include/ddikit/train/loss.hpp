#pragma once

#include "ddikit/core/ops.hpp"

namespace ddikit::train {

/// Scalar view of one composite-loss evaluation.
struct LossBreakdown {
  double pred = 0.0;
  double unc = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

/// Mean stable binary cross-entropy with logits.
core::Tensor bce_with_logits(const core::Tensor& mu, const core::Tensor& y);

/// mean((sigmoid(mu) - y)^2 * exp(-s) + s): penalizes confident mistakes and
/// regularizes the predicted variance.
core::Tensor uncertainty_loss(const core::Tensor& mu, const core::Tensor& s,
                              const core::Tensor& y);

struct LossTensors {
  core::Tensor pred, unc, kl, total;
  LossBreakdown values() const;
};

/// total = pred + lambda_unc * unc + lambda_kl * kl; the kl argument is
/// mean(KL_i) + mean(KL_j).
LossTensors total_loss(const core::Tensor& pred, const core::Tensor& unc, const core::Tensor& kl,
                       double lambda_unc, double lambda_kl);

}  // namespace ddikit::train
