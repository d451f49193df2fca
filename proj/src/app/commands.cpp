#include "mgfusion/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/stack_codec.hpp"
#include "mgfusion/dataio/synthetic.hpp"
#include "mgfusion/models/checkpoint.hpp"
#include "mgfusion/training/cross_validation.hpp"
#include "mgfusion/training/metrics.hpp"
#include "mgfusion/training/reports.hpp"

namespace mgf {
namespace {

constexpr std::uint64_t kValidationStream = 0xa11d;
constexpr std::uint64_t kTrainStream = 0x7a17;

using nlohmann::ordered_json;

const std::string& require(const std::string& value, const char* key) {
  if (value.empty()) fail(ErrorKind::config, std::string("missing required setting '") + key + "'");
  return value;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(require(cfg.out, "out")) / name;
}

std::vector<Example> load_for(const RunConfig& cfg, const ModelSpec& spec, const LogSink& log) {
  auto records = load_manifest(require(cfg.manifest, "manifest"));
  if (!cfg.test_session.empty()) {
    std::erase_if(records, [&](const UtteranceRecord& r) { return r.session != cfg.test_session; });
    if (records.empty()) fail(ErrorKind::validation, "no utterances in session '" + cfg.test_session + "'");
  }
  LoadOptions options;
  options.speech_levels = {spec.granularities.begin(), spec.granularities.end()};
  options.log = log;
  return load_examples(records, options);
}

void warn_absent(const std::vector<std::size_t>& absent, const LogSink& log) {
  if (!log) return;
  for (std::size_t c : absent) {
    log("warning: class '" + std::string(label_names()[c]) + "' absent from the labels, UA over present classes");
  }
}

ordered_json predictions_json(const std::vector<Example>& examples, const std::vector<std::vector<double>>& logits) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto p = softmax_values(logits[i]);
    const auto arg = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    rows.push_back({{"id", examples[i].id},
                    {"label", std::string(label_names()[examples[i].label])},
                    {"predicted", std::string(label_names()[arg])},
                    {"logits", logits[i]},
                    {"posterior", p}});
  }
  return rows;
}

}  // namespace

std::size_t cmd_synth(const RunConfig& cfg, const LogSink& log) {
  const auto records = generate_synthetic(cfg.synth, require(cfg.out, "out"));
  if (log) log("wrote " + std::to_string(records.size()) + " utterances to " + cfg.out);
  return records.size();
}

std::size_t cmd_pool(const RunConfig& cfg, const LogSink& log) {
  const auto records = load_manifest(require(cfg.manifest, "manifest"));
  require(cfg.out, "out");
  const std::set<Granularity> levels(cfg.pool_levels.begin(), cfg.pool_levels.end());
  const auto vowels = arpabet_vowels();
  std::string pool_log;
  std::size_t written = 0;
  for (const auto& r : records) {
    const LayeredEmbedding frames = read_stack_file(r.speech_stack_path);
    std::vector<std::string> warnings;
    const AlignmentTiers tiers =
        parse_alignment(read_text_file(r.alignment_path), frames.positions, &warnings, r.id);
    auto sink = [&](const std::string& line) {
      pool_log += r.id + ": " + line + "\n";
      if (log) log(r.id + ": " + line);
    };
    for (const auto& w : warnings) sink(w);
    const auto pooled = derive_speech_levels(frames, tiers, levels, vowels, sink);
    for (Granularity g : cfg.pool_levels) {
      write_stack_file(out_path(cfg, r.id + "." + to_string(g) + ".mgef").string(), pooled.at(g));
      ++written;
    }
  }
  write_text_file(out_path(cfg, "pool.log").string(), pool_log);
  if (log) log("wrote " + std::to_string(written) + " stacks to " + cfg.out);
  return written;
}

double cmd_train(const RunConfig& cfg, const LogSink& log) {
  cfg.spec.validate();
  cfg.train.validate();
  auto records = load_manifest(require(cfg.manifest, "manifest"));
  require(cfg.out, "out");
  if (!cfg.test_session.empty()) {
    std::erase_if(records, [&](const UtteranceRecord& r) { return r.session == cfg.test_session; });
  }
  LoadOptions options;
  options.speech_levels = {cfg.spec.granularities.begin(), cfg.spec.granularities.end()};
  options.log = log;
  const auto examples = load_examples(records, options);
  if (examples.size() < 2) fail(ErrorKind::validation, "training needs at least 2 utterances");

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = make_rng(cfg.train.seed, kValidationStream);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.train.val_fraction * static_cast<double>(examples.size()))));
  ExampleView val, train;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_val ? val : train).push_back(&examples[order[i]]);

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.train.seed, kTrainStream);
  const auto result = train_model(cfg.spec, train, val, tc, log);
  save_checkpoint(out_path(cfg, "model.mgck").string(), result.model);
  write_text_file(out_path(cfg, "history.json").string(), history_to_json(result.history));
  if (log) {
    log("best epoch " + std::to_string(result.history.best_epoch) + ", validation UA " +
        std::to_string(result.history.best_val_ua));
  }
  return result.history.best_val_ua;
}

double cmd_eval(const RunConfig& cfg, const LogSink& log) {
  const auto model = load_checkpoint<float>(require(cfg.checkpoint, "checkpoint"));
  const auto examples = load_for(cfg, model.spec(), log);
  const Evaluation ev = evaluate(model, view_of(examples), true);
  warn_absent(ev.absent_classes, log);
  if (!cfg.out.empty()) {
    ordered_json j = {{"checkpoint", cfg.checkpoint},
                      {"test_session", cfg.test_session},
                      {"utterances", examples.size()},
                      {"ua", ev.ua},
                      {"loss", ev.loss},
                      {"predictions", predictions_json(examples, ev.logits)}};
    write_text_file(out_path(cfg, "eval.json").string(), j.dump(2) + "\n");
  }
  if (log) log("UA " + std::to_string(ev.ua) + " on " + std::to_string(examples.size()) + " utterances");
  return ev.ua;
}

double cmd_cv(const RunConfig& cfg, const LogSink& log) {
  cfg.spec.validate();
  cfg.train.validate();
  require(cfg.out, "out");
  RunConfig all = cfg;
  all.test_session.clear();
  const auto examples = load_for(all, cfg.spec, log);
  const CvReport report = run_cv(examples, cfg.spec, cfg.train, cfg.jobs, log);
  write_cv_reports(report, cfg.out);
  if (log) {
    log(std::to_string(report.folds.size()) + " fold runs, aggregate UA " + std::to_string(report.aggregate_ua));
  }
  return report.aggregate_ua;
}

double cmd_combine(const RunConfig& cfg, const LogSink& log) {
  const auto a = load_checkpoint<float>(require(cfg.checkpoint_a, "checkpoint_a"));
  const auto b = load_checkpoint<float>(require(cfg.checkpoint_b, "checkpoint_b"));
  ModelSpec levels = a.spec();
  for (Granularity g : b.spec().granularities)
    if (!levels.uses_speech(g)) levels.granularities.push_back(g);
  const auto examples = load_for(cfg, levels, log);

  std::vector<std::size_t> predictions, labels;
  std::vector<std::vector<double>> logits;
  for (const auto& e : examples) {
    const auto input = ModelInput::from_example(e);
    const Prediction p = combine_scores(predict(a, input).logits, predict(b, input).logits);
    predictions.push_back(p.predicted_class());
    labels.push_back(e.label);
    logits.push_back(p.logits);
  }
  const auto ua = unweighted_accuracy_present(predictions, labels, a.spec().classes);
  warn_absent(ua.absent_classes, log);
  if (!cfg.out.empty()) {
    ordered_json j = {{"checkpoint_a", cfg.checkpoint_a},
                      {"checkpoint_b", cfg.checkpoint_b},
                      {"test_session", cfg.test_session},
                      {"utterances", examples.size()},
                      {"ua", ua.value},
                      {"predictions", predictions_json(examples, logits)}};
    write_text_file(out_path(cfg, "combine.json").string(), j.dump(2) + "\n");
  }
  if (log) log("combined UA " + std::to_string(ua.value) + " on " + std::to_string(examples.size()) + " utterances");
  return ua.value;
}

}  // namespace mgf
