#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mgfusion/common/rng.hpp"
#include "mgfusion/diffcore/tensor.hpp"

namespace mgf::diff {

enum class Mode { train, eval };

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kMaskedLogit = -1e9;

// x[.., in] · W[in, out] + b[out]
template <class T>
Tensor<T> affine(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// a[M, K] · b[K, N]
template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// a[M, K] · b[N, K]^T
template <class T>
Tensor<T> matmul_transposed(const Tensor<T>& a, const Tensor<T>& b);

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <class T>
Tensor<T> scale(const Tensor<T>& x, double factor);

// Adds row[n] to every row of x[.., n].
template <class T>
Tensor<T> add_row(const Tensor<T>& x, const Tensor<T>& row);

template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape);

template <class T>
Tensor<T> relu(const Tensor<T>& x);

// Softmax over the last axis, with max subtraction.
template <class T>
Tensor<T> softmax(const Tensor<T>& x);

template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                     double eps = kLayerNormEps);

// Inverted dropout: survivors scaled by 1/(1-p) in train mode; identity in eval.
template <class T>
Tensor<T> dropout(const Tensor<T>& x, double p, Mode mode, Rng& rng);

// Mean over the unmasked rows of x[K, D].
template <class T>
Tensor<T> masked_mean(const Tensor<T>& x, const Mask& mask);

// Concatenation along the last axis.
template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& xs);

// Columns [offset, offset + width) of x[.., n].
template <class T>
Tensor<T> slice_last(const Tensor<T>& x, std::size_t offset, std::size_t width);

// Mean over the batch of -log softmax(logits[b])[target[b]] for logits[B, C].
template <class T>
Tensor<T> cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> targets);

// stack[L, K, D] mixed with weights[L]: sum_l w_l x_l / sum_l w_l.
// Throws a numerical error when |sum_l w_l| < min_weight_sum.
template <class T>
Tensor<T> layer_weighted_average(const Tensor<T>& stack, const Tensor<T>& weights,
                                 double min_weight_sum = 1e-8);

// Additive attention bias: 0 for kept keys, kMaskedLogit for masked ones.
template <class T>
Tensor<T> mask_bias(const Mask& mask);

}  // namespace mgf::diff
