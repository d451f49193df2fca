#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mgfusion/dataio/dataset.hpp"
#include "mgfusion/models/model.hpp"

namespace mgf {

struct TrainConfig {
  double learning_rate = 0.0;  // 0 = architecture default
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
  std::size_t repeats = 5;

  void validate() const;  // throws a config error
  double resolved_learning_rate(const ModelSpec& spec) const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_ua = 0.0;  // from the train-mode outputs of the epoch
  double val_loss = 0.0;
  double val_ua = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_ua = 0.0;
  bool stopped_early = false;
  double learning_rate = 0.0;
};

struct TrainResult {
  Model<float> model;  // carries the best-epoch weights
  TrainHistory history;
};

using ExampleView = std::vector<const Example*>;

// Seeded minibatch Adam on mean cross-entropy with early stopping on the
// validation UA. Every class must occur in `train`. A non-finite loss or
// degenerate layer weights abort with a numerical error.
TrainResult train_model(const ModelSpec& spec, const ExampleView& train, const ExampleView& val,
                        const TrainConfig& config, const LogSink& log = {});

struct Evaluation {
  std::vector<std::size_t> predictions;
  std::vector<std::size_t> labels;
  std::vector<std::vector<double>> logits;
  double loss = 0.0;
  double ua = 0.0;
  std::vector<std::size_t> absent_classes;  // non-empty only when lenient
};

// Eval-mode pass. With `lenient`, classes absent from the labels are left
// out of the UA instead of raising a metric error.
template <class T>
Evaluation evaluate(const Model<T>& model, const ExampleView& examples, bool lenient = false);

ExampleView view_of(const std::vector<Example>& examples);

}  // namespace mgf
