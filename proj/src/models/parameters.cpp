#include "mgfusion/models/parameters.hpp"

#include <algorithm>

#include "mgfusion/common/error.hpp"

namespace mgf {

template <class T>
diff::Tensor<T> ParameterStore<T>::add(const std::string& name, diff::Tensor<T> tensor) {
  if (find(name)) fail(ErrorKind::contract, "duplicate parameter name '" + name + "'");
  if (!tensor.requires_grad()) tensor = diff::Tensor<T>::variable(tensor.shape(), {tensor.values().begin(), tensor.values().end()});
  entries_.emplace_back(name, tensor);
  return tensor;
}

template <class T>
diff::Tensor<T> ParameterStore<T>::add_uniform(const std::string& name, Shape shape, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<T> values(element_count(shape));
  for (auto& v : values) v = static_cast<T>(dist(rng));
  return add(name, diff::Tensor<T>::variable(std::move(shape), std::move(values)));
}

template <class T>
diff::Tensor<T> ParameterStore<T>::add_constant(const std::string& name, Shape shape, T value) {
  std::vector<T> values(element_count(shape), value);
  return add(name, diff::Tensor<T>::variable(std::move(shape), std::move(values)));
}

template <class T>
const diff::Tensor<T>* ParameterStore<T>::find(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return &t;
  return nullptr;
}

template <class T>
diff::Tensor<T>& ParameterStore<T>::at(const std::string& name) {
  for (auto& [n, t] : entries_)
    if (n == name) return t;
  fail(ErrorKind::contract, "no parameter named '" + name + "'");
}

template <class T>
std::size_t ParameterStore<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.size();
  return n;
}

template <class T>
std::vector<diff::Tensor<T>> ParameterStore<T>::tensors() const {
  std::vector<diff::Tensor<T>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

template <class T>
void ParameterStore<T>::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

template <class T>
std::vector<std::vector<T>> ParameterStore<T>::snapshot() const {
  std::vector<std::vector<T>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.emplace_back(e.second.values().begin(), e.second.values().end());
  return out;
}

template <class T>
void ParameterStore<T>::restore(const std::vector<std::vector<T>>& values) {
  if (values.size() != entries_.size()) fail(ErrorKind::contract, "snapshot has wrong parameter count");
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto dst = entries_[i].second.mutable_values();
    if (dst.size() != values[i].size()) fail(ErrorKind::contract, "snapshot shape mismatch for '" + entries_[i].first + "'");
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;

}  // namespace mgf
