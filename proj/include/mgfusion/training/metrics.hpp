#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace mgf {

// Unweighted accuracy: mean over classes of per-class recall. Every class in
// [0, classes) must occur in `labels`; an absent class is a metric error.
double unweighted_accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                           std::size_t classes);

struct PartialAccuracy {
  double value = 0.0;
  std::vector<std::size_t> absent_classes;
};

// Same metric averaged over the classes that do occur in `labels`.
PartialAccuracy unweighted_accuracy_present(std::span<const std::size_t> predictions,
                                            std::span<const std::size_t> labels, std::size_t classes);

// Tracks the best validation metric; a tie is not an improvement. Stops after
// `patience` consecutive epochs without improvement.
class EarlyStopper {
 public:
  enum class Decision { proceed, stop };

  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  Decision update(double metric);

  bool last_improved() const { return last_improved_; }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based; 0 before any update
  double best_metric() const { return best_; }
  std::size_t epochs_seen() const { return epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
  bool last_improved_ = false;
};

}  // namespace mgf
