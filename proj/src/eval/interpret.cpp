#include "ddikit/eval/interpret.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ddikit::eval {

using core::Tensor;

SimilarityMatrix atom_similarity_matrix(const Tensor& node_states) {
  const std::int64_t n = node_states.rows();
  const std::int64_t d = node_states.cols();
  SimilarityMatrix sim;
  sim.n = static_cast<std::size_t>(n);
  sim.values.assign(static_cast<std::size_t>(n * n),
                    std::numeric_limits<double>::quiet_NaN());
  sim.degenerate.assign(static_cast<std::size_t>(n), false);

  const auto vals = node_states.values();
  std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
  std::vector<double> norm(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t c = 0; c < d; ++c) mean[a] += vals[a * d + c];
    mean[a] /= static_cast<double>(d);
    for (std::int64_t c = 0; c < d; ++c) {
      const double dev = vals[a * d + c] - mean[a];
      norm[a] += dev * dev;
    }
    sim.degenerate[static_cast<std::size_t>(a)] = norm[a] == 0.0;
  }

  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) {
      if (sim.degenerate[static_cast<std::size_t>(a)] ||
          sim.degenerate[static_cast<std::size_t>(b)]) {
        continue;  // NaN sentinel stays
      }
      if (a == b) {
        sim.values[a * n + b] = 1.0;
        continue;
      }
      double cov = 0.0;
      for (std::int64_t c = 0; c < d; ++c) {
        cov += (vals[a * d + c] - mean[a]) * (vals[b * d + c] - mean[b]);
      }
      sim.values[a * n + b] = cov / std::sqrt(norm[a] * norm[b]);
    }
  }
  return sim;
}

namespace {

AttributionSide side_from_grad(const Tensor& features, const chem::MolecularGraph& mol,
                               int radius) {
  const std::int64_t n = features.rows();
  const std::int64_t d = features.cols();
  AttributionSide side;
  side.scores.assign(static_cast<std::size_t>(n), 0.0);

  double total = 0.0;
  if (features.has_grad()) {
    const auto grad = features.grad();
    for (std::int64_t a = 0; a < n; ++a) {
      double sq = 0.0;
      for (std::int64_t c = 0; c < d; ++c) sq += grad[a * d + c] * grad[a * d + c];
      side.scores[static_cast<std::size_t>(a)] = std::sqrt(sq);
      total += side.scores[static_cast<std::size_t>(a)];
    }
  }
  if (total == 0.0) {
    side.flagged_uniform = true;
    for (auto& v : side.scores) v = 1.0 / static_cast<double>(n);
  } else {
    for (auto& v : side.scores) v /= total;
  }

  side.top_atom = 0;
  for (std::int64_t a = 1; a < n; ++a) {
    if (side.scores[static_cast<std::size_t>(a)] >
        side.scores[static_cast<std::size_t>(side.top_atom)]) {
      side.top_atom = static_cast<int>(a);
    }
  }

  // Breadth-first bond walk out to the radius.
  const auto adj = mol.adjacency();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::queue<int> frontier;
  dist[static_cast<std::size_t>(side.top_atom)] = 0;
  frontier.push(side.top_atom);
  while (!frontier.empty()) {
    const int at = frontier.front();
    frontier.pop();
    if (dist[static_cast<std::size_t>(at)] >= radius) continue;
    for (int nb : adj[static_cast<std::size_t>(at)]) {
      if (dist[static_cast<std::size_t>(nb)] == -1) {
        dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(at)] + 1;
        frontier.push(nb);
      }
    }
  }
  for (std::int64_t a = 0; a < n; ++a) {
    if (dist[static_cast<std::size_t>(a)] >= 0) side.neighbourhood.push_back(static_cast<int>(a));
  }
  return side;
}

}  // namespace

Attribution atom_attribution(model::ModelParams& params, const chem::MolecularGraph& drug_i,
                             const chem::MolecularGraph& drug_j, int relation, int radius) {
  if (!drug_i.featurized() || !drug_j.featurized()) {
    throw std::invalid_argument("atom_attribution: graphs must be featurized");
  }
  auto left = graph::batch_single(drug_i, params.config.node_dim, params.config.edge_dim);
  auto right = graph::batch_single(drug_j, params.config.node_dim, params.config.edge_dim);
  auto left_in = model::make_inputs(left, /*requires_grad=*/true);
  auto right_in = model::make_inputs(right, /*requires_grad=*/true);

  auto fwd = model::forward_batch(params, left, left_in, right, right_in, {relation},
                                  model::Mode::Eval, model::BnPolicy::frozen());
  fwd.mu.backward();

  Attribution out;
  out.left = side_from_grad(left_in.node_features, drug_i, radius);
  out.right = side_from_grad(right_in.node_features, drug_j, radius);

  // The backward pass also left gradients on the parameters; clear them so a
  // probe never perturbs a later optimizer step.
  params.zero_grad();
  return out;
}

}  // namespace ddikit::eval
