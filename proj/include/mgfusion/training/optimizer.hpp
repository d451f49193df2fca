#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mgfusion/diffcore/tensor.hpp"

namespace mgf {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class T>
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  explicit AdamState(AdamConfig c) : config(c) {}
};

// One bias-corrected Adam update from the parameters' accumulated grads.
// Parameters without a grad are treated as having a zero gradient.
template <class T>
void adam_step(std::span<diff::Tensor<T>> parameters, AdamState<T>& state);

}  // namespace mgf
