#include "mgfusion/training/metrics.hpp"

#include <string>

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/manifest.hpp"

namespace mgf {
namespace {

struct Counts {
  std::vector<std::size_t> total;
  std::vector<std::size_t> correct;
};

Counts count(std::span<const std::size_t> predictions, std::span<const std::size_t> labels, std::size_t classes) {
  if (predictions.size() != labels.size()) {
    fail(ErrorKind::metric, std::to_string(predictions.size()) + " predictions for " + std::to_string(labels.size()) +
                                " labels");
  }
  if (classes == 0) fail(ErrorKind::metric, "class count must be positive");
  Counts c{std::vector<std::size_t>(classes, 0), std::vector<std::size_t>(classes, 0)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes || predictions[i] >= classes) {
      fail(ErrorKind::label, "class index out of range at sample " + std::to_string(i));
    }
    ++c.total[labels[i]];
    if (predictions[i] == labels[i]) ++c.correct[labels[i]];
  }
  return c;
}

std::string class_name(std::size_t c) {
  if (c < kNumClasses) return std::string(label_names()[c]);
  return "class " + std::to_string(c);
}

}  // namespace

double unweighted_accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                           std::size_t classes) {
  const Counts c = count(predictions, labels, classes);
  double sum = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    if (c.total[k] == 0) fail(ErrorKind::metric, "class '" + class_name(k) + "' is absent from the labels");
    sum += static_cast<double>(c.correct[k]) / static_cast<double>(c.total[k]);
  }
  return sum / static_cast<double>(classes);
}

PartialAccuracy unweighted_accuracy_present(std::span<const std::size_t> predictions,
                                            std::span<const std::size_t> labels, std::size_t classes) {
  const Counts c = count(predictions, labels, classes);
  PartialAccuracy out;
  double sum = 0;
  std::size_t present = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    if (c.total[k] == 0) {
      out.absent_classes.push_back(k);
      continue;
    }
    sum += static_cast<double>(c.correct[k]) / static_cast<double>(c.total[k]);
    ++present;
  }
  if (present == 0) fail(ErrorKind::metric, "no labels to score");
  out.value = sum / static_cast<double>(present);
  return out;
}

EarlyStopper::Decision EarlyStopper::update(double metric) {
  ++epochs_;
  last_improved_ = metric > best_;
  if (last_improved_) {
    best_ = metric;
    best_epoch_ = epochs_;
    stale_ = 0;
    return Decision::proceed;
  }
  ++stale_;
  return stale_ >= patience_ ? Decision::stop : Decision::proceed;
}

}  // namespace mgf
