#include "ddikit/core/gradcheck.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ddikit::core {

std::string GradCheckReport::summary() const {
  std::ostringstream oss;
  oss << "gradcheck: " << elements_checked << " elements, max rel error " << max_rel_error;
  if (!flagged.empty()) {
    oss << ", " << flagged.size() << " over tolerance (first at input " << flagged[0].input_index
        << " element " << flagged[0].element << ": analytic " << flagged[0].analytic
        << " vs numeric " << flagged[0].numeric << ")";
  }
  return oss.str();
}

namespace {

Scalar eval_scalar(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                   const std::vector<Tensor>& inputs, const char* what, std::size_t input_index,
                   std::int64_t element) {
  const Tensor out = f(inputs);
  if (out.size() != 1) {
    throw std::invalid_argument("check_gradients: function must return a one-element tensor");
  }
  const Scalar v = out.item();
  if (!std::isfinite(v)) {
    std::ostringstream oss;
    oss << "check_gradients: non-finite value during " << what << " at input " << input_index
        << " element " << element;
    throw std::runtime_error(oss.str());
  }
  return v;
}

}  // namespace

GradCheckReport check_gradients(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                                const std::vector<Tensor>& inputs, Scalar step, Scalar tolerance) {
  if (step <= 0.0) throw std::invalid_argument("check_gradients: step must be positive");

  for (auto& in : inputs) in.node()->grad.clear();
  Tensor out = f(inputs);
  if (out.size() != 1) {
    throw std::invalid_argument("check_gradients: function must return a one-element tensor");
  }
  if (!std::isfinite(out.item())) {
    throw std::runtime_error("check_gradients: non-finite base value");
  }
  out.backward();

  // Snapshot the analytic gradients before the records get replaced below.
  std::vector<std::vector<Scalar>> analytic(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inputs[i].requires_grad()) continue;
    auto g = inputs[i].grad();
    analytic[i].assign(g.begin(), g.end());
    if (analytic[i].empty()) analytic[i].assign(static_cast<std::size_t>(inputs[i].size()), 0.0);
    for (std::size_t e = 0; e < analytic[i].size(); ++e) {
      if (!std::isfinite(analytic[i][e])) {
        std::ostringstream oss;
        oss << "check_gradients: non-finite analytic gradient at input " << i << " element " << e;
        throw std::runtime_error(oss.str());
      }
    }
  }

  GradCheckReport report;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inputs[i].requires_grad()) continue;
    Tensor in = inputs[i];
    auto vals = in.values_mut();
    for (std::int64_t e = 0; e < in.size(); ++e) {
      const Scalar saved = vals[e];
      vals[e] = saved + step;
      const Scalar up = eval_scalar(f, inputs, "forward perturbation", i, e);
      vals[e] = saved - step;
      const Scalar down = eval_scalar(f, inputs, "backward perturbation", i, e);
      vals[e] = saved;

      const Scalar numeric = (up - down) / (2.0 * step);
      const Scalar a = analytic[i][static_cast<std::size_t>(e)];
      const Scalar denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const Scalar rel = std::abs(a - numeric) / denom;
      report.max_rel_error = std::max(report.max_rel_error, rel);
      ++report.elements_checked;
      if (rel > tolerance) {
        report.flagged.push_back({i, e, a, numeric, rel});
      }
    }
  }
  return report;
}

}  // namespace ddikit::core
