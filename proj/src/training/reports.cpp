#include "mgfusion/training/reports.hpp"

#include <filesystem>

#include <json.hpp>

#include "mgfusion/dataio/stack_codec.hpp"

namespace mgf {
namespace {

using nlohmann::ordered_json;

ordered_json history_json(const TrainHistory& h) {
  ordered_json epochs = ordered_json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"train_ua", e.train_ua},
                      {"val_loss", e.val_loss},
                      {"val_ua", e.val_ua}});
  }
  return {{"learning_rate", h.learning_rate},
          {"best_epoch", h.best_epoch},
          {"best_val_ua", h.best_val_ua},
          {"stopped_early", h.stopped_early},
          {"epochs", std::move(epochs)}};
}

ordered_json fold_json(const FoldReport& f) {
  return {{"repeat", f.repeat},
          {"fold", f.fold},
          {"session", f.session},
          {"seed", f.seed},
          {"train_size", f.train_size},
          {"val_size", f.val_size},
          {"test_size", f.test_size},
          {"test_ua", f.test_ua},
          {"test_loss", f.test_loss},
          {"absent_test_classes", f.absent_test_classes},
          {"history", history_json(f.history)}};
}

ordered_json config_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size}, {"max_epochs", c.max_epochs},
          {"patience", c.patience},           {"val_fraction", c.val_fraction}, {"seed", c.seed},
          {"repeats", c.repeats}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string history_to_json(const TrainHistory& history) { return dump(history_json(history)); }

std::string fold_report_to_json(const FoldReport& fold) { return dump(fold_json(fold)); }

std::string cv_summary_to_json(const CvReport& report) {
  ordered_json folds = ordered_json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"repeat", f.repeat},
                     {"session", f.session},
                     {"test_ua", f.test_ua},
                     {"best_epoch", f.history.best_epoch}});
  }
  ordered_json j = {{"model_spec", report.spec.serialize()},
                    {"train_config", config_json(report.config)},
                    {"fold_runs", report.folds.size()},
                    {"aggregate_ua", report.aggregate_ua},
                    {"folds", std::move(folds)}};
  return dump(j);
}

void write_cv_reports(const CvReport& report, const std::string& dir) {
  const std::filesystem::path root(dir);
  for (const auto& f : report.folds) {
    const auto path = root / "folds" / ("repeat" + std::to_string(f.repeat) + "_" + f.session + ".json");
    write_text_file(path.string(), fold_report_to_json(f));
  }
  write_text_file((root / "summary.json").string(), cv_summary_to_json(report));
}

std::string train_config_to_text(const TrainConfig& config) { return dump(config_json(config)); }

}  // namespace mgf
