#include "mgfusion/models/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "mgfusion/common/error.hpp"

namespace mgf {

using diff::Tensor;

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

std::string stream_key(Granularity g) { return std::string(1, granularity_letter(g)); }

}  // namespace

Mask StreamInput::effective_mask() const {
  if (!stack) fail(ErrorKind::contract, "stream input without a stack");
  if (mask.size() == 0) return Mask::full(stack->positions);
  if (mask.size() != stack->positions) {
    fail(ErrorKind::dimension, "mask of length " + std::to_string(mask.size()) + " for " +
                                   std::to_string(stack->positions) + " positions");
  }
  return mask;
}

ModelInput ModelInput::from_example(const Example& example) {
  ModelInput in;
  in.text.stack = &example.text;
  for (const auto& [g, stack] : example.speech) in.speech[g].stack = &stack;
  return in;
}

template <class T>
struct Model<T>::Impl {
  std::vector<std::string> streams;  // "T" first, then speech letters in P, W, S, F order
  std::map<std::string, LayerMixer<T>> mixers;
  std::map<std::string, LinearBranch<T>> branches;
  std::optional<SelfAttentionEncoder<T>> encoder;
  Dense<T> classifier_hidden, classifier_out;
  std::map<Granularity, CoattentionStack<T>> coattention;
  std::optional<EarlyFusionHead<T>> head;
  std::optional<LinearBranch<T>> concat_branch;

  struct Sequence {
    Tensor<T> values;
    Mask mask;
  };

  Sequence sequence(const std::string& key, const ModelInput& input) const {
    const StreamInput* stream = nullptr;
    if (key == "T") {
      stream = &input.text;
    } else {
      for (const auto& [g, s] : input.speech)
        if (stream_key(g) == key) stream = &s;
    }
    if (!stream || !stream->stack) fail(ErrorKind::validation, "model input lacks the '" + key + "' stream");
    Mask mask = stream->effective_mask();
    return {mix_layers(*stream->stack, mixers.at(key)), std::move(mask)};
  }
};

template <class T>
Model<T>::Model(const ModelSpec& spec) : spec_(spec), impl_(std::make_unique<Impl>()) {
  spec_.validate_complete();
  Rng rng = make_rng(spec_.seed, kInitStream);
  Impl& m = *impl_;
  const std::size_t D = spec_.dim;
  const std::size_t C = spec_.classes;

  if (spec_.text) m.streams.push_back("T");
  for (Granularity g : spec_.granularities) m.streams.push_back(stream_key(g));
  for (const auto& key : m.streams) {
    const std::size_t layers = key == "T" ? spec_.text_layers : spec_.speech_layers;
    LayerMixer<T> mixer(layers, D);
    params_.add("mixer." + key + ".weights", mixer.weights);
    params_.add("mixer." + key + ".ln.gain", mixer.ln_gain);
    params_.add("mixer." + key + ".ln.bias", mixer.ln_bias);
    m.mixers.emplace(key, std::move(mixer));
  }

  switch (spec_.arch) {
    case Architecture::linear:
    case Architecture::late_fusion:
      for (const auto& key : m.streams)
        m.branches.emplace(key, LinearBranch<T>(params_, "branch." + key, D, spec_.hidden1, spec_.hidden2, C, rng));
      break;
    case Architecture::transformer:
      m.encoder.emplace(params_, "encoder", spec_.encoder_layers, D, spec_.heads, spec_.ffn_multiplier, rng);
      m.classifier_hidden = Dense<T>(params_, "classifier.hidden", D, spec_.hidden1, rng);
      m.classifier_out = Dense<T>(params_, "classifier.out", spec_.hidden1, C, rng);
      break;
    case Architecture::coattention:
      for (Granularity g : spec_.granularities) {
        m.coattention.emplace(g, CoattentionStack<T>(params_, "coattention." + stream_key(g), spec_.encoder_layers, D,
                                                     spec_.heads, spec_.ffn_multiplier, rng));
      }
      m.head.emplace(params_, "head", D * spec_.granularities.size(), C, rng);
      break;
    case Architecture::concat:
      m.concat_branch.emplace(params_, "branch.concat", D * m.streams.size(), spec_.hidden1, spec_.hidden2, C, rng);
      break;
  }
}

template <class T>
Model<T>::~Model() = default;
template <class T>
Model<T>::Model(Model&&) noexcept = default;
template <class T>
Model<T>& Model<T>::operator=(Model&&) noexcept = default;

template <class T>
ModelOutput<T> Model<T>::forward(const ModelInput& input, diff::Mode mode, Rng* rng) const {
  const Impl& m = *impl_;
  ForwardContext ctx{spec_.dropout, mode, rng};
  ModelOutput<T> out;

  switch (spec_.arch) {
    case Architecture::linear:
    case Architecture::late_fusion: {
      for (const auto& key : m.streams) {
        auto seq = m.sequence(key, input);
        Tensor<T> logits = m.branches.at(key)(seq.values, seq.mask, ctx);
        out.logits = out.logits.defined() ? diff::add(out.logits, logits) : logits;
        out.branch_logits.emplace_back(key, std::move(logits));
      }
      break;
    }
    case Architecture::transformer: {
      auto seq = m.sequence(m.streams.front(), input);
      const Tensor<T> encoded = (*m.encoder)(seq.values, seq.mask, ctx);
      Tensor<T> hidden = diff::relu(m.classifier_hidden(diff::masked_mean(encoded, seq.mask)));
      if (mode == diff::Mode::train && spec_.dropout > 0.0) {
        if (!rng) fail(ErrorKind::contract, "train-mode forward pass needs a random generator");
        hidden = diff::dropout(hidden, spec_.dropout, mode, *rng);
      }
      out.logits = m.classifier_out(hidden);
      out.branch_logits.emplace_back(m.streams.front(), out.logits);
      break;
    }
    case Architecture::coattention: {
      auto text = m.sequence("T", input);
      std::vector<Tensor<T>> pooled;
      for (Granularity g : spec_.granularities) {
        auto speech = m.sequence(stream_key(g), input);
        pooled.push_back(m.coattention.at(g)(text.values, text.mask, speech.values, speech.mask, ctx).fused);
      }
      const Tensor<T> fused = pooled.size() == 1 ? pooled.front() : diff::concat(pooled);
      out.logits = (*m.head)(fused, ctx);
      out.branch_logits.emplace_back("coattention", out.logits);
      break;
    }
    case Architecture::concat: {
      std::vector<Tensor<T>> pooled;
      for (const auto& key : m.streams) {
        auto seq = m.sequence(key, input);
        pooled.push_back(diff::masked_mean(seq.values, seq.mask));
      }
      const Tensor<T> joined = diff::reshape(diff::concat(pooled), {1, spec_.dim * pooled.size()});
      out.logits = (*m.concat_branch)(joined, Mask::full(1), ctx);
      out.branch_logits.emplace_back("concat", out.logits);
      break;
    }
  }
  return out;
}

template class Model<float>;
template class Model<double>;

std::size_t Prediction::predicted_class() const {
  return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

std::vector<double> softmax_values(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] = std::exp(logits[i] - mx));
  for (auto& v : p) v /= sum;
  return p;
}

template <class T>
Prediction predict(const Model<T>& model, const ModelInput& input) {
  const auto out = model.forward(input, diff::Mode::eval);
  Prediction p;
  p.logits.assign(out.logits.values().begin(), out.logits.values().end());
  p.posterior = softmax_values(p.logits);
  return p;
}

template Prediction predict(const Model<float>&, const ModelInput&);
template Prediction predict(const Model<double>&, const ModelInput&);

Prediction combine_scores(std::span<const double> logits_a, std::span<const double> logits_b) {
  if (logits_a.size() != logits_b.size()) {
    fail(ErrorKind::dimension, "combine_scores: " + std::to_string(logits_a.size()) + " vs " +
                                   std::to_string(logits_b.size()) + " logits");
  }
  Prediction p;
  p.logits.resize(logits_a.size());
  for (std::size_t i = 0; i < p.logits.size(); ++i) p.logits[i] = (logits_a[i] + logits_b[i]) / 2.0;
  p.posterior = softmax_values(p.logits);
  return p;
}

ModelSpec resolve_spec_dims(ModelSpec spec, const Example& example) {
  spec.validate();
  std::size_t dim = 0;
  auto take_dim = [&dim, &example](std::size_t d, const char* what) {
    if (dim != 0 && d != dim) {
      fail(ErrorKind::validation, "utterance '" + example.id + "': " + what + " dimension " + std::to_string(d) +
                                      " disagrees with " + std::to_string(dim));
    }
    dim = d;
  };
  if (spec.text) {
    take_dim(example.text.dim, "text");
    if (spec.text_layers == 0) spec.text_layers = example.text.layers;
  }
  for (Granularity g : spec.granularities) {
    auto it = example.speech.find(g);
    if (it == example.speech.end()) {
      fail(ErrorKind::validation, "utterance '" + example.id + "' lacks " + to_string(g) + "-level speech");
    }
    take_dim(it->second.dim, "speech");
    if (spec.speech_layers == 0) spec.speech_layers = it->second.layers;
  }
  if (spec.dim == 0) spec.dim = dim;
  spec.validate_complete();
  return spec;
}

}  // namespace mgf
