#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mgf {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// Per-position validity flags for a padded sequence. A false flag marks
// padding that attention and averaging must ignore.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {}

  static Mask full(std::size_t length) { return Mask(std::vector<std::uint8_t>(length, 1)); }

  std::size_t size() const { return flags_.size(); }
  bool operator[](std::size_t i) const { return flags_[i] != 0; }
  std::size_t count() const;
  const std::vector<std::uint8_t>& flags() const { return flags_; }

  // Copy of this mask followed by `extra` padding positions.
  Mask padded(std::size_t extra) const;

 private:
  std::vector<std::uint8_t> flags_;
};

namespace diff {

template <class T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward_fn;

  T* grad_data() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad.data();
  }
};

// Handle to a node in a dynamically recorded computation. Copies share the
// node; parameters are long-lived leaf tensors whose grad accumulates across
// backward passes until zero_grad().
template <class T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  static Tensor constant(Shape shape, std::vector<T> values);
  static Tensor variable(Shape shape, std::vector<T> values);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(T value) { return constant({1}, {value}); }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t extent(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const T> values() const { return node_->value; }
  std::span<T> mutable_values() { return node_->value; }
  T operator[](std::size_t i) const { return node_->value[i]; }
  T item() const;

  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  std::span<const T> grad() const { return node_->grad; }
  void zero_grad();

  // Reverse-mode sweep from this scalar. Leaf grads accumulate.
  void backward() const;

  const std::shared_ptr<Node<T>>& node() const { return node_; }

  // Builds an op result; records parents and the backward closure only when
  // some input requires grad.
  static Tensor from_op(Shape shape, std::vector<T> values, std::vector<Tensor> inputs,
                        std::function<void(Node<T>&)> backward_fn);

 private:
  explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  std::shared_ptr<Node<T>> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace diff
}  // namespace mgf
