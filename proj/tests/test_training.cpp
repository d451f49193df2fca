#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include <json.hpp>

#include "mgfusion/dataio/stack_codec.hpp"
#include "mgfusion/models/checkpoint.hpp"
#include "mgfusion/training/cross_validation.hpp"
#include "mgfusion/training/metrics.hpp"
#include "mgfusion/training/optimizer.hpp"
#include "mgfusion/training/reports.hpp"
#include "test_support.hpp"

using namespace mgf;
using diff::Tensor;
using test::thrown_kind;

namespace {

SynthConfig small_synth(std::size_t n = 80) {
  SynthConfig c;
  c.utterances = n;
  c.layers = 2;
  c.dim = 8;
  c.words_max = 4;
  c.seed = 3;
  return c;
}

ModelSpec small_spec(Architecture arch = Architecture::late_fusion) {
  ModelSpec s;
  s.arch = arch;
  s.hidden1 = 16;
  s.hidden2 = 16;
  s.heads = 2;
  s.encoder_layers = 1;
  s.ffn_multiplier = 2;
  return s;
}

TrainConfig quick(std::size_t epochs = 4) {
  TrainConfig t;
  t.max_epochs = epochs;
  t.batch_size = 16;
  t.repeats = 1;
  t.seed = 9;
  return t;
}

bool same_history(const TrainHistory& a, const TrainHistory& b) {
  if (a.epochs.size() != b.epochs.size() || a.best_epoch != b.best_epoch) return false;
  for (std::size_t i = 0; i < a.epochs.size(); ++i) {
    const auto &x = a.epochs[i], &y = b.epochs[i];
    if (x.train_loss != y.train_loss || x.val_loss != y.val_loss || x.val_ua != y.val_ua || x.train_ua != y.train_ua)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    auto p = Tensor<double>::variable({3}, {1, -2, 3});
    p.zero_grad();
    std::vector<Tensor<double>> ps = {p};
    AdamState<double> st(AdamConfig{0.1});
    adam_step<double>(ps, st);
    CHECK(std::vector<double>(p.values().begin(), p.values().end()) == std::vector<double>{1, -2, 3});
    CHECK(st.step == 1);
  }
  SUBCASE("first step moves by -lr * sign(g)") {
    auto p = Tensor<double>::variable({3}, {0.5, 0.5, 0.5});
    const auto loss = diff::reshape(
        diff::matmul(Tensor<double>::constant({1, 3}, {3, -0.01, 200}), diff::reshape(p, {3, 1})), {1});
    loss.backward();
    std::vector<Tensor<double>> ps = {p};
    AdamState<double> st(AdamConfig{1e-3});
    adam_step<double>(ps, st);
    CHECK(p[0] == doctest::Approx(0.5 - 1e-3).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(0.5 + 1e-3).epsilon(1e-6));
    CHECK(p[2] == doctest::Approx(0.5 - 1e-3).epsilon(1e-9));
  }
  SUBCASE("identical runs give identical trajectories") {
    auto run = [] {
      Rng rng(4);
      auto p = test::random_variable(rng, {5});
      std::vector<Tensor<double>> ps = {p};
      AdamState<double> st;
      for (int i = 0; i < 20; ++i) {
        p.zero_grad();
        test::probe(diff::mul(p, p)).backward();
        adam_step<double>(ps, st);
      }
      return std::vector<double>(p.values().begin(), p.values().end());
    };
    CHECK(run() == run());
  }
  SUBCASE("shape mismatch") {
    auto p = Tensor<double>::variable({2}, {1, 2});
    std::vector<Tensor<double>> ps = {p};
    AdamState<double> st;
    adam_step<double>(ps, st);
    std::vector<Tensor<double>> other = {Tensor<double>::variable({3}, {1, 2, 3})};
    CHECK(thrown_kind([&] { adam_step<double>(other, st); }) == ErrorKind::contract);
  }
}

TEST_CASE("unweighted_accuracy") {
  const std::vector<std::size_t> y = {0, 1, 2, 3, 3, 3};
  CHECK(unweighted_accuracy(y, y, 4) == 1.0);
  const std::vector<std::size_t> labels2 = {0, 0, 1, 1}, preds2 = {0, 0, 1, 0};
  CHECK(unweighted_accuracy(preds2, labels2, 2) == 0.75);
  const std::vector<std::size_t> imbalanced = {0, 1, 1, 1, 1, 1, 1, 2, 3, 3, 3};
  for (std::size_t c = 0; c < 4; ++c) {
    const std::vector<std::size_t> constant(imbalanced.size(), c);
    CHECK(unweighted_accuracy(constant, imbalanced, 4) == doctest::Approx(0.25));
  }
  const std::vector<std::size_t> no_sad = {0, 1, 3};
  const auto msg = test::thrown_message([&] { unweighted_accuracy(no_sad, no_sad, 4); });
  CHECK(msg.find("sad") != std::string::npos);
  CHECK(thrown_kind([&] { unweighted_accuracy(no_sad, no_sad, 4); }) == ErrorKind::metric);
  const auto partial = unweighted_accuracy_present(no_sad, no_sad, 4);
  CHECK(partial.value == 1.0);
  CHECK(partial.absent_classes == std::vector<std::size_t>{2});
}

TEST_CASE("unweighted_accuracy ignores per-class duplication") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::size_t> labels, preds;
    for (std::size_t i = 0; i < 30; ++i) {
      labels.push_back(i < 4 ? i : rng() % 4);
      preds.push_back(rng() % 4);
    }
    const double base = unweighted_accuracy(preds, labels, 4);
    const std::size_t k = rng() % 4, times = 1 + rng() % 4;
    auto l2 = labels, p2 = preds;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == k)
        for (std::size_t t = 0; t < times; ++t) {
          l2.push_back(labels[i]);
          p2.push_back(preds[i]);
        }
    CHECK(unweighted_accuracy(p2, l2, 4) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("early stopping") {
  EarlyStopper s(2);
  CHECK(s.update(0.5) == EarlyStopper::Decision::proceed);
  CHECK(s.update(0.4) == EarlyStopper::Decision::proceed);
  CHECK(s.update(0.4) == EarlyStopper::Decision::stop);
  CHECK(s.best_epoch() == 1);

  EarlyStopper tie(1);
  tie.update(0.7);
  CHECK(tie.update(0.7) == EarlyStopper::Decision::stop);

  EarlyStopper up(3);
  for (int i = 0; i < 100; ++i) CHECK(up.update(i * 0.001) == EarlyStopper::Decision::proceed);
  CHECK(up.best_epoch() == 100);
}

TEST_CASE("train config validation and learning-rate defaults") {
  TrainConfig t;
  CHECK_NOTHROW(t.validate());
  t.val_fraction = 1.0;
  CHECK(thrown_kind([&] { t.validate(); }) == ErrorKind::config);
  t = TrainConfig{};
  t.batch_size = 0;
  CHECK(thrown_kind([&] { t.validate(); }) == ErrorKind::config);
  t = TrainConfig{};
  CHECK(t.resolved_learning_rate(small_spec(Architecture::late_fusion)) == 1e-3);
  CHECK(t.resolved_learning_rate(small_spec(Architecture::coattention)) == 5e-5);
  t.learning_rate = 0.01;
  CHECK(t.resolved_learning_rate(small_spec(Architecture::coattention)) == 0.01);
}

TEST_CASE("training reduces the loss and is reproducible") {
  const auto data = test::synthetic_examples(small_synth(), {Granularity::frame});
  const auto view = view_of(data);
  const ExampleView train(view.begin(), view.begin() + 64), val(view.begin() + 64, view.end());
  auto cfg = quick(5);
  cfg.patience = 10;

  const auto a = train_model(small_spec(), train, val, cfg);
  REQUIRE(a.history.epochs.size() == 5);
  CHECK(a.history.epochs.back().train_loss < a.history.epochs.front().train_loss);
  const auto b = train_model(small_spec(), train, val, cfg);
  CHECK(same_history(a.history, b.history));

  auto spec0 = small_spec();
  spec0.dropout = 0.0;
  const auto c = train_model(spec0, train, val, cfg);
  const auto d = train_model(spec0, train, val, cfg);
  CHECK(same_history(c.history, d.history));
  CHECK(encode_checkpoint(c.model) == encode_checkpoint(d.model));

  // The returned weights are the best epoch's.
  const auto ev = evaluate(a.model, val, true);
  CHECK(ev.ua == doctest::Approx(a.history.best_val_ua).epsilon(1e-12));
}

TEST_CASE("training preconditions and numerical aborts") {
  const auto data = test::synthetic_examples(small_synth(), {Granularity::frame});
  const auto view = view_of(data);
  ExampleView no_sad;
  for (const Example* e : view)
    if (e->label != 2) no_sad.push_back(e);
  CHECK(thrown_kind([&] { train_model(small_spec(), no_sad, no_sad, quick()); }) == ErrorKind::validation);
  CHECK(thrown_kind([&] { train_model(small_spec(), view, {}, quick()); }) == ErrorKind::validation);

  auto wild = quick(3);
  wild.learning_rate = 1e30;
  const auto msg = test::thrown_message([&] { train_model(small_spec(), view, view, wild); });
  CHECK(msg.rfind("numerical error", 0) == 0);
}

TEST_CASE("cross-validation plan partitions the data") {
  const auto data = test::synthetic_examples(small_synth(100), {Granularity::frame});
  TrainConfig cfg = quick();
  cfg.repeats = 3;
  const auto plans = plan_cv(data, cfg);
  CHECK(plans.size() == 15);
  std::vector<std::size_t> test_count(data.size(), 0);
  for (std::size_t r = 0; r < 3; ++r) {
    std::vector<int> seen(data.size(), 0);
    for (const auto& p : plans) {
      if (p.repeat != r) continue;
      for (std::size_t i : p.test) ++seen[i], ++test_count[i];
      std::set<std::size_t> test(p.test.begin(), p.test.end());
      for (std::size_t i : p.val) CHECK(test.count(i) == 0);
      for (std::size_t i : p.train) CHECK(test.count(i) == 0);
      const std::size_t pool = data.size() - p.test.size();
      CHECK(p.val.size() == std::max<std::size_t>(1, pool / 10));
      CHECK(p.train.size() + p.val.size() == pool);
      CHECK(p.seed == cfg.seed + r);
      for (std::size_t i : p.test) CHECK(data[i].session == p.session);
    }
    for (int s : seen) CHECK(s == 1);
  }
  for (std::size_t c : test_count) CHECK(c == 3);
  // Validation draws differ between repeats.
  CHECK(plans[0].val != plans[5].val);

  std::vector<Example> one_session(data.begin(), data.begin() + 10);
  for (auto& e : one_session) e.session = "Ses01";
  CHECK(thrown_kind([&] { plan_cv(one_session, cfg); }) == ErrorKind::validation);
}

TEST_CASE("cross-validation runs are aggregated and parallel-safe") {
  const auto data = test::synthetic_examples(small_synth(80), {Granularity::frame});
  TrainConfig cfg = quick(2);
  cfg.repeats = 2;
  std::vector<std::string> lines;
  const auto serial = run_cv(data, small_spec(), cfg, 1, [&](const std::string& l) { lines.push_back(l); });
  CHECK(serial.folds.size() == 10);
  double sum = 0;
  for (const auto& f : serial.folds) sum += f.test_ua;
  CHECK(std::abs(serial.aggregate_ua - sum / 10) <= 1e-12);
  CHECK(!lines.empty());

  const auto parallel = run_cv(data, small_spec(), cfg, 3);
  REQUIRE(parallel.folds.size() == serial.folds.size());
  for (std::size_t i = 0; i < serial.folds.size(); ++i) {
    CHECK(parallel.folds[i].session == serial.folds[i].session);
    CHECK(parallel.folds[i].test_ua == serial.folds[i].test_ua);
    CHECK(same_history(parallel.folds[i].history, serial.folds[i].history));
  }
  CHECK(cv_summary_to_json(parallel) == cv_summary_to_json(serial));

  test::TempDir dir("cvreports");
  write_cv_reports(serial, dir.str());
  const auto summary = nlohmann::json::parse(read_text_file(dir.str("summary.json")));
  double from_files = 0;
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "folds")) {
    from_files += nlohmann::json::parse(read_text_file(e.path().string()))["test_ua"].get<double>();
    ++n;
  }
  CHECK(n == 10);
  CHECK(summary["fold_runs"] == 10);
  CHECK(std::abs(summary["aggregate_ua"].get<double>() - from_files / n) <= 1e-12);
}
