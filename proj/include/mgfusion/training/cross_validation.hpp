#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgfusion/training/trainer.hpp"

namespace mgf {

// One leave-one-session-out fold of one repeat. Indices refer to the example
// list handed to plan_cv.
struct FoldPlan {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::string session;  // held-out test session
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Sessions are sorted; repeat r uses seed base + r. The validation set is
// floor(val_fraction * pool) utterances (at least 1) drawn from the
// non-test pool, re-drawn for every repeat and fold.
std::vector<FoldPlan> plan_cv(const std::vector<Example>& examples, const TrainConfig& config);

struct FoldReport {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::string session;
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t test_size = 0;
  TrainHistory history;
  double test_ua = 0.0;
  double test_loss = 0.0;
  std::vector<std::size_t> absent_test_classes;
};

struct CvReport {
  ModelSpec spec;
  TrainConfig config;
  std::vector<FoldReport> folds;  // ordered by (repeat, fold)
  double aggregate_ua = 0.0;
};

double aggregate_ua(const std::vector<FoldReport>& folds);

// Trains and tests every planned fold; `jobs` folds run concurrently.
// `log` may be called from several threads but never concurrently.
CvReport run_cv(const std::vector<Example>& examples, const ModelSpec& spec, const TrainConfig& config,
                std::size_t jobs = 1, const LogSink& log = {});

}  // namespace mgf
