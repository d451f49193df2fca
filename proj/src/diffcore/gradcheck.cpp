#include "mgfusion/diffcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mgfusion/common/error.hpp"

namespace mgf::diff {

GradCheckResult backward_and_check(const std::function<Tensor<double>()>& loss,
                                   std::vector<Tensor<double>> parameters,
                                   const GradCheckOptions& options) {
  for (auto& p : parameters) p.zero_grad();
  const Tensor<double> out = loss();
  if (out.size() != 1) {
    fail(ErrorKind::contract, "gradient check needs a scalar output, got shape " + shape_to_string(out.shape()));
  }
  out.backward();

  GradCheckResult result;
  for (auto& p : parameters) {
    result.gradients.emplace_back(p.grad().begin(), p.grad().end());
  }

  for (std::size_t t = 0; t < parameters.size(); ++t) {
    auto values = parameters[t].mutable_values();
    const auto& analytic = result.gradients[t];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      const double h = options.step * std::max(1.0, std::abs(original));
      values[i] = original + h;
      const double up = loss().item();
      values[i] = original - h;
      const double down = loss().item();
      values[i] = original;

      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.empty() ? 0.0 : analytic[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.coordinates_checked;
      if (rel > result.max_relative_error || !std::isfinite(rel)) {
        result.max_relative_error = std::isfinite(rel) ? rel : INFINITY;
        result.worst_parameter = t;
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace mgf::diff
