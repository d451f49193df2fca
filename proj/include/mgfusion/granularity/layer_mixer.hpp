#pragma once

#include <cstddef>
#include <string>

#include "mgfusion/diffcore/ops.hpp"
#include "mgfusion/granularity/layered_embedding.hpp"

namespace mgf {

inline constexpr double kMinLayerWeightSum = 1e-8;

// Learnable layer weighting followed by layer normalization, one instance per
// stream (text or a speech granularity).
template <class T>
struct LayerMixer {
  diff::Tensor<T> weights;  // [L], initialized to 1
  diff::Tensor<T> ln_gain;  // [D], 1
  diff::Tensor<T> ln_bias;  // [D], 0

  LayerMixer() = default;
  LayerMixer(std::size_t layers, std::size_t dim);

  std::size_t layers() const { return weights.size(); }
  std::size_t dim() const { return ln_gain.size(); }
};

// LayeredEmbedding as a constant [L, K, D] tensor.
template <class T>
diff::Tensor<T> stack_tensor(const LayeredEmbedding& stack);

// [K, D] sequence u_k = LN(sum_l w_l u_k^l / sum_l w_l).
template <class T>
diff::Tensor<T> mix_layers(const LayeredEmbedding& stack, const LayerMixer<T>& mixer);

extern template struct LayerMixer<float>;
extern template struct LayerMixer<double>;

}  // namespace mgf
