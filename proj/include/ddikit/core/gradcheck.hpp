#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddikit/core/tensor.hpp"

namespace ddikit::core {

struct GradCheckIssue {
  std::size_t input_index = 0;
  std::int64_t element = 0;
  Scalar analytic = 0.0;
  Scalar numeric = 0.0;
  Scalar rel_error = 0.0;
};

struct GradCheckReport {
  Scalar max_rel_error = 0.0;
  std::size_t elements_checked = 0;
  std::vector<GradCheckIssue> flagged;

  bool ok() const { return flagged.empty(); }
  std::string summary() const;
};

/// Compares the analytic gradient of a scalar-valued function against central
/// finite differences (f(x+h) - f(x-h)) / 2h, element by element over every
/// input that requires gradients. Relative error is |a - n| / max(|a|, |n|,
/// 1e-8); elements above the tolerance are flagged. The function must be
/// deterministic in its inputs. Non-finite values anywhere abort with an
/// error naming the offending element.
GradCheckReport check_gradients(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                                const std::vector<Tensor>& inputs, Scalar step,
                                Scalar tolerance);

}  // namespace ddikit::core
