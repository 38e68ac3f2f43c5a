#include "ddikit/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ddikit::eval {

namespace {

void check_binary(std::span<const int> labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("metrics: labels must be 0 or 1");
  }
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("auroc: scores and labels must be non-empty and aligned");
  }
  check_binary(labels);
  const std::size_t p = static_cast<std::size_t>(std::accumulate(labels.begin(), labels.end(), 0));
  const std::size_t n = labels.size() - p;
  if (p == 0 || n == 0) throw std::invalid_argument("auroc: needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over tie groups; rank sum of positives gives the statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  const double pd = static_cast<double>(p);
  return (rank_sum_pos - pd * (pd + 1.0) / 2.0) / (pd * static_cast<double>(n));
}

double aupr(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("aupr: scores and labels must be non-empty and aligned");
  }
  check_binary(labels);
  const int total_pos = std::accumulate(labels.begin(), labels.end(), 0);
  if (total_pos == 0) throw std::invalid_argument("aupr: needs at least one positive");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  int tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    tp += labels[order[k]];
    const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

ClassificationMetrics classification_metrics(std::span<const double> scores,
                                             std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("classification_metrics: scores and labels must align");
  }
  check_binary(labels);
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && labels[i] == 1) ++tp;
    if (predicted && labels[i] == 0) ++fp;
    if (!predicted && labels[i] == 0) ++tn;
    if (!predicted && labels[i] == 1) ++fn;
  }
  ClassificationMetrics m;
  m.accuracy = scores.empty()
                   ? 0.0
                   : static_cast<double>(tp + tn) / static_cast<double>(scores.size());
  if (tp + fp == 0) {
    m.precision = 0.0;
    m.precision_defined = false;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.recall = 0.0;
    m.recall_defined = false;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
  return m;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson: needs at least two aligned samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("pearson: correlation undefined for a constant vector");
  }
  return sxy / std::sqrt(sxx * syy);
}

double uncertainty_error_correlation(std::span<const double> variances,
                                     std::span<const double> probabilities,
                                     std::span<const int> labels) {
  if (variances.size() != probabilities.size() || variances.size() != labels.size()) {
    throw std::invalid_argument("uncertainty_error_correlation: inputs must align");
  }
  check_binary(labels);
  std::vector<double> sq_error(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double e = probabilities[i] - static_cast<double>(labels[i]);
    sq_error[i] = e * e;
  }
  return pearson(variances, sq_error);
}

double macro_f1(std::span<const int> predicted, std::span<const int> actual, int n_classes) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw std::invalid_argument("macro_f1: inputs must be non-empty and aligned");
  }
  if (n_classes < 1) throw std::invalid_argument("macro_f1: n_classes must be >= 1");
  double total = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const bool pc = predicted[i] == c;
      const bool ac = actual[i] == c;
      if (pc && ac) ++tp;
      if (pc && !ac) ++fp;
      if (!pc && ac) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    total += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  }
  return total / static_cast<double>(n_classes);
}

std::string EvalReport::to_text() const {
  std::ostringstream oss;
  oss.precision(10);
  oss << "auroc\t" << auroc << "\n";
  oss << "aupr\t" << aupr << "\n";
  oss << "f1\t" << f1 << "\n";
  oss << "accuracy\t" << accuracy << "\n";
  oss << "precision\t" << precision << "\n";
  oss << "recall\t" << recall << "\n";
  oss << "uncertainty_error_correlation\t" << uncertainty_error_correlation << "\n";
  oss << "precision_defined\t" << (precision_defined ? 1 : 0) << "\n";
  oss << "recall_defined\t" << (recall_defined ? 1 : 0) << "\n";
  oss << "correlation_defined\t" << (correlation_defined ? 1 : 0) << "\n";
  oss << "positives\t" << positives << "\n";
  oss << "negatives\t" << negatives << "\n";
  oss << "prevalence\t" << prevalence << "\n";
  return oss.str();
}

EvalReport evaluate(std::span<const double> probabilities, std::span<const double> variances,
                    std::span<const int> labels, double threshold) {
  EvalReport report;
  report.auroc = auroc(probabilities, labels);
  report.aupr = aupr(probabilities, labels);
  const auto cls = classification_metrics(probabilities, labels, threshold);
  report.f1 = cls.f1;
  report.accuracy = cls.accuracy;
  report.precision = cls.precision;
  report.recall = cls.recall;
  report.precision_defined = cls.precision_defined;
  report.recall_defined = cls.recall_defined;
  try {
    report.uncertainty_error_correlation =
        uncertainty_error_correlation(variances, probabilities, labels);
  } catch (const std::invalid_argument&) {
    report.uncertainty_error_correlation = 0.0;
    report.correlation_defined = false;
  }
  for (int y : labels) {
    if (y == 1) {
      ++report.positives;
    } else {
      ++report.negatives;
    }
  }
  report.prevalence =
      static_cast<double>(report.positives) / static_cast<double>(labels.size());
  return report;
}

}  // namespace ddikit::eval
