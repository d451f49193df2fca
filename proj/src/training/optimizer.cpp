#include "mgfusion/training/optimizer.hpp"

#include <cmath>
#include <string>

#include "mgfusion/common/error.hpp"

namespace mgf {

template <class T>
void adam_step(std::span<diff::Tensor<T>> parameters, AdamState<T>& state) {
  if (state.step == 0 && state.first_moment.empty()) {
    for (const auto& p : parameters) {
      state.first_moment.emplace_back(p.size(), T(0));
      state.second_moment.emplace_back(p.size(), T(0));
    }
  }
  if (state.first_moment.size() != parameters.size()) {
    fail(ErrorKind::contract, "optimizer state tracks " + std::to_string(state.first_moment.size()) +
                                  " parameters, got " + std::to_string(parameters.size()));
  }
  for (std::size_t i = 0; i < parameters.size(); ++i) {
    if (state.first_moment[i].size() != parameters[i].size()) {
      fail(ErrorKind::contract, "optimizer state shape mismatch for parameter " + std::to_string(i));
    }
  }

  ++state.step;
  const auto& c = state.config;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);

  for (std::size_t i = 0; i < parameters.size(); ++i) {
    auto& p = parameters[i];
    auto values = p.mutable_values();
    const auto grad = p.grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    const bool has_grad = grad.size() == values.size();
    for (std::size_t j = 0; j < values.size(); ++j) {
      const T g = has_grad ? grad[j] : T(0);
      m[j] = b1 * m[j] + (T(1) - b1) * g;
      v[j] = b2 * v[j] + (T(1) - b2) * g * g;
      const double m_hat = static_cast<double>(m[j]) / correction1;
      const double v_hat = static_cast<double>(v[j]) / correction2;
      values[j] -= static_cast<T>(c.learning_rate * m_hat / (std::sqrt(v_hat) + c.eps));
    }
  }
}

template void adam_step(std::span<diff::Tensor<float>>, AdamState<float>&);
template void adam_step(std::span<diff::Tensor<double>>, AdamState<double>&);

}  // namespace mgf
