#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ddikit::eval {

/// Rank-based AUROC equal to the Mann-Whitney statistic
/// (wins + ties/2) / (P*N). Throws when only one class is present.
double auroc(std::span<const double> scores, std::span<const int> labels);

/// Average precision over the stable descending-score sweep:
/// sum_k (R_k - R_{k-1}) * P_k. Throws when there are no positives.
double aupr(std::span<const double> scores, std::span<const int> labels);

struct ClassificationMetrics {
  double f1 = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool precision_defined = true;  // false when flagged 0 for an empty denominator
  bool recall_defined = true;
};

ClassificationMetrics classification_metrics(std::span<const double> scores,
                                             std::span<const int> labels,
                                             double threshold = 0.5);

/// Pearson correlation; throws if either vector is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation between predicted variance and squared prediction
/// error (probability vs label).
double uncertainty_error_correlation(std::span<const double> variances,
                                     std::span<const double> probabilities,
                                     std::span<const int> labels);

/// Unweighted mean of one-vs-rest F1 over all classes (empty-denominator
/// classes contribute zero).
double macro_f1(std::span<const int> predicted, std::span<const int> actual, int n_classes);

/// Flat evaluation record ready for key-value serialization.
struct EvalReport {
  double auroc = 0.0;
  double aupr = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double uncertainty_error_correlation = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool correlation_defined = true;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double prevalence = 0.0;

  std::string to_text() const;
};

EvalReport evaluate(std::span<const double> probabilities, std::span<const double> variances,
                    std::span<const int> labels, double threshold = 0.5);

}  // namespace ddikit::eval
