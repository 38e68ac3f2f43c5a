#include "ddikit/train/loss.hpp"

namespace ddikit::train {

using core::Tensor;
namespace ops = ddikit::core;

Tensor bce_with_logits(const Tensor& mu, const Tensor& y) {
  return ops::bce_with_logits_mean(mu, y);
}

Tensor uncertainty_loss(const Tensor& mu, const Tensor& s, const Tensor& y) {
  Tensor err = ops::sub(ops::sigmoid(mu), y);
  Tensor weighted = ops::mul(ops::square(err), ops::exp_op(ops::scale(s, -1.0)));
  return ops::mean_all(ops::add(weighted, s));
}

LossBreakdown LossTensors::values() const {
  return {pred.item(), unc.item(), kl.item(), total.item()};
}

LossTensors total_loss(const Tensor& pred, const Tensor& unc, const Tensor& kl, double lambda_unc,
                       double lambda_kl) {
  LossTensors out;
  out.pred = pred;
  out.unc = unc;
  out.kl = kl;
  out.total = ops::add(pred, ops::add(ops::scale(unc, lambda_unc), ops::scale(kl, lambda_kl)));
  return out;
}

}  // namespace ddikit::train
