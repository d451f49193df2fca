#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mgfusion/diffcore/tensor.hpp"

namespace mgf::diff {

struct GradCheckOptions {
  // Central-difference step, scaled by max(1, |theta|) per coordinate.
  double step = 1e-5;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double denominator_floor = 1e-3;
};

struct GradCheckResult {
  std::vector<std::vector<double>> gradients;  // reverse-mode, one per parameter
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates_checked = 0;
};

// Runs `loss` once with reverse mode, then re-evaluates it with every
// parameter coordinate nudged by +-h. `loss` must be deterministic and
// return a single-element tensor.
GradCheckResult backward_and_check(const std::function<Tensor<double>()>& loss,
                                   std::vector<Tensor<double>> parameters,
                                   const GradCheckOptions& options = {});

}  // namespace mgf::diff
