#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mgfusion/common/rng.hpp"
#include "mgfusion/diffcore/tensor.hpp"

namespace mgf {

// Named trainable tensors in registration order. Names are unique.
template <class T>
class ParameterStore {
 public:
  using Entry = std::pair<std::string, diff::Tensor<T>>;

  diff::Tensor<T> add(const std::string& name, diff::Tensor<T> tensor);
  diff::Tensor<T> add_uniform(const std::string& name, Shape shape, double bound, Rng& rng);
  diff::Tensor<T> add_constant(const std::string& name, Shape shape, T value);

  const diff::Tensor<T>* find(const std::string& name) const;
  diff::Tensor<T>& at(const std::string& name);

  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<diff::Tensor<T>> tensors() const;

  void zero_grad();

  // Value snapshots for best-epoch tracking.
  std::vector<std::vector<T>> snapshot() const;
  void restore(const std::vector<std::vector<T>>& values);

 private:
  std::vector<Entry> entries_;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;

}  // namespace mgf
