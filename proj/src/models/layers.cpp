#include "mgfusion/models/layers.hpp"

#include <cmath>

#include "mgfusion/common/error.hpp"

namespace mgf {

using diff::Tensor;

namespace {

template <class T>
Tensor<T> apply_dropout(const Tensor<T>& x, const ForwardContext& ctx) {
  if (ctx.mode == diff::Mode::eval || ctx.dropout == 0.0) return x;
  if (!ctx.rng) fail(ErrorKind::contract, "train-mode forward pass needs a random generator");
  return diff::dropout(x, ctx.dropout, ctx.mode, *ctx.rng);
}

}  // namespace

template <class T>
Dense<T>::Dense(ParameterStore<T>& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng)
    : weight(store.add_uniform(name + ".weight", {in, out}, 1.0 / std::sqrt(static_cast<double>(in)), rng)),
      bias(store.add_constant(name + ".bias", {out}, T(0))) {}

template <class T>
LayerNormParams<T>::LayerNormParams(ParameterStore<T>& store, const std::string& name, std::size_t dim)
    : gain(store.add_constant(name + ".gain", {dim}, T(1))), bias(store.add_constant(name + ".bias", {dim}, T(0))) {}

template <class T>
MultiHeadAttention<T>::MultiHeadAttention(ParameterStore<T>& store, const std::string& name, std::size_t dim,
                                          std::size_t heads_, Rng& rng)
    : query(store, name + ".q", dim, dim, rng),
      key(store, name + ".k", dim, dim, rng),
      value(store, name + ".v", dim, dim, rng),
      output(store, name + ".o", dim, dim, rng),
      heads(heads_) {
  if (heads == 0 || dim % heads != 0) {
    fail(ErrorKind::dimension, "attention dim " + std::to_string(dim) + " not divisible by " +
                                   std::to_string(heads) + " heads");
  }
}

template <class T>
Tensor<T> MultiHeadAttention<T>::operator()(const Tensor<T>& queries, const Tensor<T>& keys_values,
                                            const Mask& kv_mask) const {
  if (keys_values.rank() != 2 || kv_mask.size() != keys_values.extent(0)) {
    fail(ErrorKind::dimension, "attention: key mask of length " + std::to_string(kv_mask.size()) +
                                   " for keys " + shape_to_string(keys_values.shape()));
  }
  if (kv_mask.count() == 0) fail(ErrorKind::empty_sequence, "attention over a fully masked key sequence");

  const Tensor<T> q = query(queries);
  const Tensor<T> k = key(keys_values);
  const Tensor<T> v = value(keys_values);
  const std::size_t dim = q.extent(1);
  const std::size_t width = dim / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(width));
  const bool masked = kv_mask.count() != kv_mask.size();
  const Tensor<T> bias = masked ? diff::mask_bias<T>(kv_mask) : Tensor<T>();

  std::vector<Tensor<T>> per_head;
  per_head.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Tensor<T> qh = heads == 1 ? q : diff::slice_last(q, h * width, width);
    const Tensor<T> kh = heads == 1 ? k : diff::slice_last(k, h * width, width);
    const Tensor<T> vh = heads == 1 ? v : diff::slice_last(v, h * width, width);
    Tensor<T> scores = diff::scale(diff::matmul_transposed(qh, kh), inv_sqrt);
    if (masked) scores = diff::add_row(scores, bias);
    per_head.push_back(diff::matmul(diff::softmax(scores), vh));
  }
  return output(heads == 1 ? per_head.front() : diff::concat(per_head));
}

template <class T>
AttentionBlock<T>::AttentionBlock(ParameterStore<T>& store, const std::string& name, std::size_t dim,
                                  std::size_t heads, std::size_t ffn_multiplier, Rng& rng)
    : attention(store, name + ".attn", dim, heads, rng),
      norm1(store, name + ".norm1", dim),
      ffn_in(store, name + ".ffn_in", dim, dim * ffn_multiplier, rng),
      ffn_out(store, name + ".ffn_out", dim * ffn_multiplier, dim, rng),
      norm2(store, name + ".norm2", dim) {}

template <class T>
Tensor<T> AttentionBlock<T>::operator()(const Tensor<T>& queries, const Tensor<T>& keys_values, const Mask& kv_mask,
                                        const ForwardContext& ctx) const {
  const Tensor<T> x = norm1(diff::add(queries, attention(queries, keys_values, kv_mask)));
  const Tensor<T> f = ffn_out(apply_dropout(diff::relu(ffn_in(x)), ctx));
  return norm2(diff::add(x, f));
}

template <class T>
CoattentionStack<T>::CoattentionStack(ParameterStore<T>& store, const std::string& name, std::size_t layers,
                                      std::size_t dim, std::size_t heads, std::size_t ffn_multiplier, Rng& rng) {
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string prefix = name + ".layer" + std::to_string(l);
    text_branch.emplace_back(store, prefix + ".text", dim, heads, ffn_multiplier, rng);
    speech_branch.emplace_back(store, prefix + ".speech", dim, heads, ffn_multiplier, rng);
  }
}

template <class T>
typename CoattentionStack<T>::Result CoattentionStack<T>::operator()(const Tensor<T>& text, const Mask& text_mask,
                                                                     const Tensor<T>& speech, const Mask& speech_mask,
                                                                     const ForwardContext& ctx) const {
  Tensor<T> t = text;
  Tensor<T> s = speech;
  for (std::size_t l = 0; l < text_branch.size(); ++l) {
    Tensor<T> next_t = text_branch[l](t, s, speech_mask, ctx);
    Tensor<T> next_s = speech_branch[l](s, t, text_mask, ctx);
    t = std::move(next_t);
    s = std::move(next_s);
  }
  Result r;
  r.text_vector = diff::masked_mean(t, text_mask);
  r.speech_vector = diff::masked_mean(s, speech_mask);
  r.fused = diff::scale(diff::add(r.text_vector, r.speech_vector), 0.5);
  return r;
}

template <class T>
SelfAttentionEncoder<T>::SelfAttentionEncoder(ParameterStore<T>& store, const std::string& name, std::size_t depth,
                                              std::size_t dim, std::size_t heads, std::size_t ffn_multiplier,
                                              Rng& rng) {
  for (std::size_t l = 0; l < depth; ++l)
    layers.emplace_back(store, name + ".layer" + std::to_string(l), dim, heads, ffn_multiplier, rng);
}

template <class T>
Tensor<T> SelfAttentionEncoder<T>::operator()(const Tensor<T>& x, const Mask& mask, const ForwardContext& ctx) const {
  Tensor<T> h = x;
  for (const auto& layer : layers) h = layer(h, h, mask, ctx);
  return h;
}

template <class T>
LinearBranch<T>::LinearBranch(ParameterStore<T>& store, const std::string& name, std::size_t in,
                              std::size_t hidden1, std::size_t hidden2, std::size_t classes, Rng& rng)
    : fc1(store, name + ".fc1", in, hidden1, rng),
      fc2(store, name + ".fc2", hidden1, hidden2, rng),
      logits(store, name + ".logits", hidden2, classes, rng) {}

template <class T>
Tensor<T> LinearBranch<T>::operator()(const Tensor<T>& sequence, const Mask& mask, const ForwardContext& ctx) const {
  const Tensor<T> h = apply_dropout(diff::relu(fc1(sequence)), ctx);
  const Tensor<T> l = apply_dropout(diff::relu(fc2(h)), ctx);
  return logits(diff::masked_mean(l, mask));
}

template <class T>
EarlyFusionHead<T>::EarlyFusionHead(ParameterStore<T>& store, const std::string& name, std::size_t in,
                                    std::size_t classes, Rng& rng)
    : fuse(store, name + ".fuse", in, in, rng),
      norm(store, name + ".norm", in),
      logits(store, name + ".logits", in, classes, rng) {}

template <class T>
Tensor<T> EarlyFusionHead<T>::operator()(const Tensor<T>& fused, const ForwardContext& ctx) const {
  const Tensor<T> g = norm(diff::add(apply_dropout(diff::relu(fuse(fused)), ctx), fused));
  return logits(g);
}

template struct Dense<float>;
template struct Dense<double>;
template struct LayerNormParams<float>;
template struct LayerNormParams<double>;
template struct MultiHeadAttention<float>;
template struct MultiHeadAttention<double>;
template struct AttentionBlock<float>;
template struct AttentionBlock<double>;
template struct CoattentionStack<float>;
template struct CoattentionStack<double>;
template struct SelfAttentionEncoder<float>;
template struct SelfAttentionEncoder<double>;
template struct LinearBranch<float>;
template struct LinearBranch<double>;
template struct EarlyFusionHead<float>;
template struct EarlyFusionHead<double>;

}  // namespace mgf
