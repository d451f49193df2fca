#include "mgfusion/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mgfusion/common/error.hpp"
#include "mgfusion/training/metrics.hpp"
#include "mgfusion/training/optimizer.hpp"

namespace mgf {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5b1f;

void check_labels(const ExampleView& set, std::size_t classes, const char* what) {
  for (const Example* e : set) {
    if (e->label >= classes) fail(ErrorKind::label, "utterance '" + e->id + "' has label " + std::to_string(e->label));
  }
  if (set.empty()) fail(ErrorKind::validation, std::string(what) + " set is empty");
}

std::string format_epoch(const EpochRecord& r) {
  std::ostringstream os;
  os.precision(4);
  os << std::fixed << "epoch " << r.epoch << " train_loss " << r.train_loss << " train_ua " << r.train_ua
     << " val_loss " << r.val_loss << " val_ua " << r.val_ua;
  return os.str();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail(ErrorKind::config, "learning_rate must be >= 0");
  if (batch_size == 0) fail(ErrorKind::config, "batch_size must be >= 1");
  if (max_epochs == 0) fail(ErrorKind::config, "max_epochs must be >= 1");
  if (patience == 0) fail(ErrorKind::config, "patience must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) fail(ErrorKind::config, "val_fraction must lie in (0, 1)");
  if (repeats == 0) fail(ErrorKind::config, "repeats must be >= 1");
}

double TrainConfig::resolved_learning_rate(const ModelSpec& spec) const {
  return learning_rate > 0.0 ? learning_rate : spec.default_learning_rate();
}

ExampleView view_of(const std::vector<Example>& examples) {
  ExampleView v;
  v.reserve(examples.size());
  for (const auto& e : examples) v.push_back(&e);
  return v;
}

template <class T>
Evaluation evaluate(const Model<T>& model, const ExampleView& examples, bool lenient) {
  const std::size_t C = model.spec().classes;
  check_labels(examples, C, "evaluation");
  Evaluation ev;
  double loss = 0;
  for (const Example* e : examples) {
    const Prediction p = predict(model, ModelInput::from_example(*e));
    loss -= std::log(std::max(p.posterior[e->label], 1e-300));
    ev.predictions.push_back(p.predicted_class());
    ev.labels.push_back(e->label);
    ev.logits.push_back(p.logits);
  }
  ev.loss = loss / static_cast<double>(examples.size());
  if (lenient) {
    const auto partial = unweighted_accuracy_present(ev.predictions, ev.labels, C);
    ev.ua = partial.value;
    ev.absent_classes = partial.absent_classes;
  } else {
    ev.ua = unweighted_accuracy(ev.predictions, ev.labels, C);
  }
  return ev;
}

template Evaluation evaluate(const Model<float>&, const ExampleView&, bool);
template Evaluation evaluate(const Model<double>&, const ExampleView&, bool);

TrainResult train_model(const ModelSpec& spec, const ExampleView& train, const ExampleView& val,
                        const TrainConfig& config, const LogSink& log) {
  config.validate();
  check_labels(train, spec.classes, "training");
  check_labels(val, spec.classes, "validation");
  {
    std::vector<bool> seen(spec.classes, false);
    for (const Example* e : train) seen[e->label] = true;
    for (std::size_t c = 0; c < spec.classes; ++c) {
      if (!seen[c]) fail(ErrorKind::validation, "class " + std::to_string(c) + " does not occur in the training set");
    }
  }

  Model<float> model(resolve_spec_dims(spec, *train.front()));
  TrainHistory history;
  history.learning_rate = config.resolved_learning_rate(spec);

  auto params = model.parameters().tensors();
  AdamState<float> adam(AdamConfig{history.learning_rate});
  Rng rng = make_rng(config.seed, kShuffleStream);
  EarlyStopper stopper(config.patience);
  auto best = model.parameters().snapshot();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t C = spec.classes;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    std::vector<std::size_t> predictions, labels;
    predictions.reserve(train.size());
    labels.reserve(train.size());

    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      model.parameters().zero_grad();
      for (std::size_t i = begin; i < end; ++i) {
        const Example& ex = *train[order[i]];
        ModelOutput<float> out;
        try {
          out = model.forward(ModelInput::from_example(ex), diff::Mode::train, &rng);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::numerical) throw;
          fail(ErrorKind::numerical, "epoch " + std::to_string(epoch) + ", utterance '" + ex.id + "': " + e.detail());
        }
        const std::size_t target[] = {ex.label};
        auto loss = diff::cross_entropy(diff::reshape(out.logits, {1, C}), target);
        const double value = loss.item();
        if (!std::isfinite(value)) {
          fail(ErrorKind::numerical,
               "non-finite loss at epoch " + std::to_string(epoch) + ", utterance '" + ex.id + "'");
        }
        loss_sum += value;
        diff::scale(loss, inv_batch).backward();
        const auto logits = out.logits.values();
        predictions.push_back(static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin()));
        labels.push_back(ex.label);
      }
      adam_step<float>(params, adam);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(train.size());
    record.train_ua = unweighted_accuracy(predictions, labels, C);
    const Evaluation v = evaluate(model, val, true);
    record.val_loss = v.loss;
    record.val_ua = v.ua;
    history.epochs.push_back(record);
    if (log) log(format_epoch(record));

    const auto decision = stopper.update(record.val_ua);
    if (stopper.last_improved()) best = model.parameters().snapshot();
    if (decision == EarlyStopper::Decision::stop) {
      history.stopped_early = epoch < config.max_epochs;
      break;
    }
  }

  model.parameters().restore(best);
  history.best_epoch = stopper.best_epoch();
  history.best_val_ua = stopper.best_metric();
  return {std::move(model), std::move(history)};
}

}  // namespace mgf
