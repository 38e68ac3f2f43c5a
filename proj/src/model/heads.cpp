#include "ddikit/model/heads.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace ddikit::model {

using core::Tensor;
namespace ops = ddikit::core;

CoAttentionResult co_attention(const EncodeResult& left, const EncodeResult& right,
                               const ModelParams& params) {
  const std::size_t k_scales = left.h.size();
  if (k_scales != right.h.size()) {
    throw std::invalid_argument("co_attention: scale counts differ, " +
                                std::to_string(k_scales) + " vs " +
                                std::to_string(right.h.size()));
  }
  const std::int64_t pairs = left.h[0].rows();
  if (pairs != right.h[0].rows()) {
    throw std::invalid_argument("co_attention: left/right batches are not aligned");
  }

  // Affinity columns A[:, k, l] as [P x 1] tensors.
  std::vector<std::vector<Tensor>> affinity(k_scales, std::vector<Tensor>(k_scales));
  for (std::size_t k = 0; k < k_scales; ++k) {
    Tensor projected = ops::matmul(left.h[k], params.coattn_w);
    for (std::size_t l = 0; l < k_scales; ++l) {
      affinity[k][l] = ops::sum_axis(ops::mul(projected, right.h[l]), 1);
    }
  }

  const double inv_k = 1.0 / static_cast<double>(k_scales);
  auto mean_over = [&](bool over_columns) {
    Tensor stacked;
    for (std::size_t a = 0; a < k_scales; ++a) {
      Tensor acc = over_columns ? affinity[a][0] : affinity[0][a];
      for (std::size_t b = 1; b < k_scales; ++b) {
        acc = ops::add(acc, over_columns ? affinity[a][b] : affinity[b][a]);
      }
      acc = ops::scale(acc, inv_k);
      stacked = a == 0 ? acc : ops::concat(stacked, acc, 1);
    }
    return stacked;  // [P x K]
  };

  CoAttentionResult out;
  out.alpha_i = ops::softmax(mean_over(true), 1);
  out.alpha_j = ops::softmax(mean_over(false), 1);

  auto fuse = [&](const std::vector<Tensor>& scales, const Tensor& alpha) {
    Tensor fused;
    for (std::size_t k = 0; k < k_scales; ++k) {
      // Column k of alpha via a one-hot selector keeps everything on the record.
      Tensor selector = Tensor::zeros({static_cast<std::int64_t>(k_scales), 1});
      selector.values_mut()[k] = 1.0;
      Tensor weight = ops::matmul(alpha, selector);  // [P x 1]
      Tensor term = ops::mul_colvec(scales[k], weight);
      fused = k == 0 ? term : ops::add(fused, term);
    }
    return fused;
  };
  out.h_i = fuse(left.h, out.alpha_i);
  out.h_j = fuse(right.h, out.alpha_j);
  return out;
}

Tensor rescal_score(const Tensor& h_i, const Tensor& h_j, const std::vector<int>& relation_ids,
                    const ModelParams& params) {
  const std::int64_t pairs = h_i.rows();
  if (static_cast<std::int64_t>(relation_ids.size()) != pairs) {
    throw std::invalid_argument("rescal_score: one relation id per pair required");
  }
  const bool ablated = !params.config.relation_module_enabled;
  for (int r : relation_ids) {
    if (r < 0 || r >= params.config.relation_count) {
      throw std::invalid_argument("rescal_score: unknown relation id " + std::to_string(r));
    }
  }

  // Group pairs by relation so each matrix multiplies once.
  std::map<int, std::vector<std::int64_t>> by_relation;
  for (std::int64_t p = 0; p < pairs; ++p) {
    by_relation[ablated ? 0 : relation_ids[static_cast<std::size_t>(p)]].push_back(p);
  }

  Tensor mu;
  bool first = true;
  for (const auto& [relation, rows] : by_relation) {
    const Tensor& m = params.relation_m[static_cast<std::size_t>(ablated ? 0 : relation)];
    Tensor x = ops::gather_rows(h_i, rows);
    Tensor y = ops::gather_rows(h_j, rows);
    Tensor scores = ops::sum_axis(ops::mul(ops::matmul(x, m), y), 1);  // [rows x 1]
    Tensor placed = ops::scatter_sum(scores, rows, pairs);
    mu = first ? placed : ops::add(mu, placed);
    first = false;
  }
  return mu;
}

Tensor uncertainty_head(const Tensor& h_i, const Tensor& h_j, const ModelParams& params) {
  Tensor joint = ops::concat(h_i, h_j, 1);  // [P x 2d]
  Tensor hidden = ops::prelu(
      ops::add_rowvec(ops::matmul(joint, params.unc_w1), params.unc_b1), params.unc_slope);
  return ops::add_rowvec(ops::matmul(hidden, params.unc_w2), params.unc_b2);
}

}  // namespace ddikit::model
