#include "mgfusion/diffcore/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "mgfusion/common/error.hpp"

namespace mgf {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

Mask Mask::padded(std::size_t extra) const {
  auto flags = flags_;
  flags.resize(flags.size() + extra, 0);
  return Mask(std::move(flags));
}

namespace diff {

template <class T>
Tensor<T> Tensor<T>::constant(Shape shape, std::vector<T> values) {
  if (element_count(shape) != values.size()) {
    fail(ErrorKind::dimension, "shape " + shape_to_string(shape) + " holds " +
                                   std::to_string(element_count(shape)) + " values, got " +
                                   std::to_string(values.size()));
  }
  auto node = std::make_shared<Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  return Tensor(std::move(node));
}

template <class T>
Tensor<T> Tensor<T>::variable(Shape shape, std::vector<T> values) {
  Tensor t = constant(std::move(shape), std::move(values));
  t.node_->requires_grad = true;
  return t;
}

template <class T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  std::vector<T> values(element_count(shape), T(0));
  Tensor t = constant(std::move(shape), std::move(values));
  t.node_->requires_grad = requires_grad;
  return t;
}

template <class T>
T Tensor<T>::item() const {
  if (size() != 1) fail(ErrorKind::contract, "item() on tensor of shape " + shape_to_string(shape()));
  return node_->value[0];
}

template <class T>
void Tensor<T>::zero_grad() {
  if (node_) node_->grad.assign(node_->value.size(), T(0));
}

template <class T>
Tensor<T> Tensor<T>::from_op(Shape shape, std::vector<T> values, std::vector<Tensor> inputs,
                             std::function<void(Node<T>&)> backward_fn) {
  Tensor out = constant(std::move(shape), std::move(values));
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (any) {
    out.node_->requires_grad = true;
    out.node_->parents.reserve(inputs.size());
    for (auto& in : inputs) out.node_->parents.push_back(in.node_);
    out.node_->backward_fn = std::move(backward_fn);
  }
  return out;
}

template <class T>
void Tensor<T>::backward() const {
  if (size() != 1) {
    fail(ErrorKind::contract, "backward() needs a scalar output, got shape " + shape_to_string(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* n : order) {
    if (n->backward_fn) n->grad.assign(n->value.size(), T(0));
  }
  node_->grad_data()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
  }
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace diff
}  // namespace mgf
