#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgfusion/dataio/dataset.hpp"
#include "mgfusion/granularity/layer_mixer.hpp"
#include "mgfusion/models/layers.hpp"
#include "mgfusion/models/model_spec.hpp"

namespace mgf {

// A stack plus its validity mask. An empty mask means "all positions valid".
struct StreamInput {
  const LayeredEmbedding* stack = nullptr;
  Mask mask;

  Mask effective_mask() const;
};

struct ModelInput {
  StreamInput text;
  std::map<Granularity, StreamInput> speech;

  static ModelInput from_example(const Example& example);
};

template <class T>
struct ModelOutput {
  diff::Tensor<T> logits;  // [C], pre-softmax
  // Per-branch logits for late fusion ("T", "P", ...); a single entry for the
  // one-stream models.
  std::vector<std::pair<std::string, diff::Tensor<T>>> branch_logits;
};

template <class T>
class Model {
 public:
  explicit Model(const ModelSpec& spec);
  ~Model();
  Model(Model&&) noexcept;
  Model& operator=(Model&&) noexcept;

  const ModelSpec& spec() const { return spec_; }
  ParameterStore<T>& parameters() { return params_; }
  const ParameterStore<T>& parameters() const { return params_; }

  // Train mode needs `rng` for dropout; eval mode ignores it.
  ModelOutput<T> forward(const ModelInput& input, diff::Mode mode, Rng* rng = nullptr) const;

  struct Impl;

 private:
  ModelSpec spec_;
  ParameterStore<T> params_;
  std::unique_ptr<Impl> impl_;
};

extern template class Model<float>;
extern template class Model<double>;

struct Prediction {
  std::vector<double> logits;
  std::vector<double> posterior;

  std::size_t predicted_class() const;
};

std::vector<double> softmax_values(std::span<const double> logits);

template <class T>
Prediction predict(const Model<T>& model, const ModelInput& input);

// Posterior of the averaged logits of two models.
Prediction combine_scores(std::span<const double> logits_a, std::span<const double> logits_b);

// Fills dim / layer counts left at 0 from an example.
ModelSpec resolve_spec_dims(ModelSpec spec, const Example& example);

}  // namespace mgf
