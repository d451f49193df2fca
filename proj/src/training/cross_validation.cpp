#include "mgfusion/training/cross_validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/manifest.hpp"

namespace mgf {
namespace {

constexpr std::uint64_t kValidationStream = 0xa11d;
constexpr std::uint64_t kInitStream = 0x1e17;
constexpr std::uint64_t kTrainStream = 0x7a17;

ExampleView pick(const std::vector<Example>& examples, const std::vector<std::size_t>& idx) {
  ExampleView v;
  v.reserve(idx.size());
  for (std::size_t i : idx) v.push_back(&examples[i]);
  return v;
}

}  // namespace

std::vector<FoldPlan> plan_cv(const std::vector<Example>& examples, const TrainConfig& config) {
  config.validate();
  std::set<std::string> session_set;
  for (const auto& e : examples) session_set.insert(e.session);
  if (session_set.size() < 2) {
    fail(ErrorKind::validation, "cross-validation needs at least 2 sessions, found " +
                                    std::to_string(session_set.size()));
  }
  const std::vector<std::string> sessions(session_set.begin(), session_set.end());

  std::vector<FoldPlan> plans;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    const std::uint64_t repeat_seed = config.seed + r;
    for (std::size_t f = 0; f < sessions.size(); ++f) {
      FoldPlan p;
      p.repeat = r;
      p.fold = f;
      p.session = sessions[f];
      p.seed = repeat_seed;
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < examples.size(); ++i) {
        (examples[i].session == p.session ? p.test : pool).push_back(i);
      }
      Rng rng = make_rng(repeat_seed, kValidationStream, f);
      std::shuffle(pool.begin(), pool.end(), rng);
      const auto n_val = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(config.val_fraction * static_cast<double>(pool.size()))));
      if (n_val >= pool.size()) {
        fail(ErrorKind::validation, "fold '" + p.session + "' leaves no training utterances");
      }
      p.val.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_val));
      p.train.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_val), pool.end());
      std::sort(p.val.begin(), p.val.end());
      std::sort(p.train.begin(), p.train.end());
      plans.push_back(std::move(p));
    }
  }
  return plans;
}

double aggregate_ua(const std::vector<FoldReport>& folds) {
  if (folds.empty()) fail(ErrorKind::metric, "no folds to aggregate");
  double sum = 0;
  for (const auto& f : folds) sum += f.test_ua;
  return sum / static_cast<double>(folds.size());
}

CvReport run_cv(const std::vector<Example>& examples, const ModelSpec& spec, const TrainConfig& config,
                std::size_t jobs, const LogSink& log) {
  const auto plans = plan_cv(examples, config);
  CvReport report;
  report.spec = spec;
  report.config = config;
  report.folds.resize(plans.size());

  std::mutex log_mutex;
  auto say = [&](const std::string& line) {
    if (!log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    log(line);
  };

  auto run_fold = [&](std::size_t i) {
    const FoldPlan& p = plans[i];
    const std::string tag = "repeat " + std::to_string(p.repeat) + " fold " + p.session;
    ModelSpec fold_spec = spec;
    fold_spec.seed = derive_seed(p.seed, kInitStream, p.fold);
    TrainConfig fold_config = config;
    fold_config.seed = derive_seed(p.seed, kTrainStream, p.fold);

    auto result = train_model(fold_spec, pick(examples, p.train), pick(examples, p.val), fold_config,
                              [&](const std::string& line) { say(tag + ": " + line); });
    const Evaluation test = evaluate(result.model, pick(examples, p.test), true);
    for (std::size_t c : test.absent_classes) {
      const std::string name = c < kNumClasses ? std::string(label_names()[c]) : std::to_string(c);
      say(tag + ": warning: class '" + name + "' absent from the test session, UA over present classes");
    }

    FoldReport& f = report.folds[i];
    f.repeat = p.repeat;
    f.fold = p.fold;
    f.session = p.session;
    f.seed = p.seed;
    f.train_size = p.train.size();
    f.val_size = p.val.size();
    f.test_size = p.test.size();
    f.history = std::move(result.history);
    f.test_ua = test.ua;
    f.test_loss = test.loss;
    f.absent_test_classes = test.absent_classes;
    say(tag + ": best epoch " + std::to_string(f.history.best_epoch) + ", test UA " + std::to_string(f.test_ua));
  };

  jobs = std::clamp<std::size_t>(jobs, 1, plans.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < plans.size(); ++i) run_fold(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(plans.size());
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < plans.size(); i = next++) {
          try {
            run_fold(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  report.aggregate_ua = aggregate_ua(report.folds);
  return report;
}

}  // namespace mgf
