#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgfusion/diffcore/ops.hpp"
#include "mgfusion/models/parameters.hpp"

namespace mgf {

// Shared forward-pass context: dropout probability, mode and generator.
struct ForwardContext {
  double dropout = 0.0;
  diff::Mode mode = diff::Mode::eval;
  Rng* rng = nullptr;
};

template <class T>
struct Dense {
  diff::Tensor<T> weight;  // [in, out]
  diff::Tensor<T> bias;    // [out]

  Dense() = default;
  // Uniform(-1/sqrt(in), 1/sqrt(in)) weights, zero bias.
  Dense(ParameterStore<T>& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng);

  diff::Tensor<T> operator()(const diff::Tensor<T>& x) const { return diff::affine(x, weight, bias); }
};

template <class T>
struct LayerNormParams {
  diff::Tensor<T> gain;
  diff::Tensor<T> bias;

  LayerNormParams() = default;
  LayerNormParams(ParameterStore<T>& store, const std::string& name, std::size_t dim);

  diff::Tensor<T> operator()(const diff::Tensor<T>& x) const { return diff::layer_norm(x, gain, bias); }
};

// Scaled dot-product attention with `heads` heads of width D/heads, followed
// by an output projection. Masked keys get kMaskedLogit before the softmax.
template <class T>
struct MultiHeadAttention {
  Dense<T> query, key, value, output;
  std::size_t heads = 1;

  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterStore<T>& store, const std::string& name, std::size_t dim, std::size_t heads, Rng& rng);

  diff::Tensor<T> operator()(const diff::Tensor<T>& queries, const diff::Tensor<T>& keys_values,
                             const Mask& kv_mask) const;
};

// Attention followed by the transformer-encoder sublayers:
// x = LN(q + attn); y = LN(x + FF(x)), FF = W_b dropout(relu(W_a x)).
template <class T>
struct AttentionBlock {
  MultiHeadAttention<T> attention;
  LayerNormParams<T> norm1;
  Dense<T> ffn_in;
  Dense<T> ffn_out;
  LayerNormParams<T> norm2;

  AttentionBlock() = default;
  AttentionBlock(ParameterStore<T>& store, const std::string& name, std::size_t dim, std::size_t heads,
                 std::size_t ffn_multiplier, Rng& rng);

  diff::Tensor<T> operator()(const diff::Tensor<T>& queries, const diff::Tensor<T>& keys_values,
                             const Mask& kv_mask, const ForwardContext& ctx) const;
};

// Paired cross-attention stack: the text stream queries the speech stream and
// the speech stream queries the text stream, `layers` times. The two final
// streams are mean-pooled and the pooled vectors averaged.
template <class T>
struct CoattentionStack {
  std::vector<AttentionBlock<T>> text_branch;
  std::vector<AttentionBlock<T>> speech_branch;

  CoattentionStack() = default;
  CoattentionStack(ParameterStore<T>& store, const std::string& name, std::size_t layers, std::size_t dim,
                   std::size_t heads, std::size_t ffn_multiplier, Rng& rng);

  struct Result {
    diff::Tensor<T> text_vector;
    diff::Tensor<T> speech_vector;
    diff::Tensor<T> fused;  // mean of the two
  };

  Result operator()(const diff::Tensor<T>& text, const Mask& text_mask, const diff::Tensor<T>& speech,
                    const Mask& speech_mask, const ForwardContext& ctx) const;
};

template <class T>
struct SelfAttentionEncoder {
  std::vector<AttentionBlock<T>> layers;

  SelfAttentionEncoder() = default;
  SelfAttentionEncoder(ParameterStore<T>& store, const std::string& name, std::size_t depth, std::size_t dim,
                       std::size_t heads, std::size_t ffn_multiplier, Rng& rng);

  diff::Tensor<T> operator()(const diff::Tensor<T>& x, const Mask& mask, const ForwardContext& ctx) const;
};

// Position-wise FF-ReLU-dropout twice, masked mean over positions, then the
// logit layer. Returns pre-softmax logits [C].
template <class T>
struct LinearBranch {
  Dense<T> fc1, fc2, logits;

  LinearBranch() = default;
  LinearBranch(ParameterStore<T>& store, const std::string& name, std::size_t in, std::size_t hidden1,
               std::size_t hidden2, std::size_t classes, Rng& rng);

  diff::Tensor<T> operator()(const diff::Tensor<T>& sequence, const Mask& mask, const ForwardContext& ctx) const;
};

// g = LN(dropout(relu(W4 c + b4)) + c); logits = W5 g + b5.
template <class T>
struct EarlyFusionHead {
  Dense<T> fuse;
  LayerNormParams<T> norm;
  Dense<T> logits;

  EarlyFusionHead() = default;
  EarlyFusionHead(ParameterStore<T>& store, const std::string& name, std::size_t in, std::size_t classes, Rng& rng);

  diff::Tensor<T> operator()(const diff::Tensor<T>& fused, const ForwardContext& ctx) const;
};

}  // namespace mgf
