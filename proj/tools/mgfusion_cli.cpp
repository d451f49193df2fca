#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgfusion/mgfusion.h"

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_file;
  std::map<std::string, std::string> values;
};

void log_to_stderr(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int fail_with(mgf_status status) {
  std::fprintf(stderr, "mgfusion: %s\n", mgf_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-granularity speech-text fusion for emotion recognition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mgf_version());

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"synth", "generate a synthetic dataset"},
      {"pool", "pool frame stacks into phone/syllable/word stacks"},
      {"train", "train one model and write a checkpoint"},
      {"eval", "score a checkpoint on a manifest"},
      {"cv", "leave-one-session-out cross-validation"},
      {"combine", "average the logits of two checkpoints"},
  };
  std::vector<Subcommand> subs(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto& sub = subs[i];
    sub.app = app.add_subcommand(commands[i].first, commands[i].second);
    sub.app->add_option("--config", sub.config_file, "key = value settings file; flags override it");
    for (std::size_t k = 0; k < mgf_config_key_count(); ++k) {
      const std::string key = mgf_config_key_name(k);
      sub.app->add_option("--" + key, sub.values[key], mgf_config_key_help(k));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : MGF_ERR_USAGE;
  }

  mgf_set_log_callback(log_to_stderr, nullptr);
  mgf_config* cfg = nullptr;
  if (mgf_config_create(&cfg) != MGF_OK) return fail_with(MGF_ERR_INTERNAL);
  struct Guard {
    mgf_config* c;
    ~Guard() { mgf_config_destroy(c); }
  } guard{cfg};

  std::size_t chosen = 0;
  while (!subs[chosen].app->parsed()) ++chosen;
  Subcommand& sub = subs[chosen];

  if (!sub.config_file.empty()) {
    if (const auto s = mgf_config_load_file(cfg, sub.config_file.c_str()); s != MGF_OK) return fail_with(s);
  }
  for (std::size_t k = 0; k < mgf_config_key_count(); ++k) {
    const std::string key = mgf_config_key_name(k);
    if (sub.app->count("--" + key) == 0) continue;
    if (const auto s = mgf_config_set(cfg, key.c_str(), sub.values[key].c_str()); s != MGF_OK) return fail_with(s);
  }

  const std::string name = commands[chosen].first;
  double metric = 0.0;
  mgf_status status = MGF_OK;
  const char* metric_name = nullptr;
  if (name == "synth") {
    status = mgf_run_synth(cfg);
  } else if (name == "pool") {
    status = mgf_run_pool(cfg);
  } else if (name == "train") {
    status = mgf_run_train(cfg, &metric);
    metric_name = "best_val_ua";
  } else if (name == "eval") {
    status = mgf_run_eval(cfg, &metric);
    metric_name = "ua";
  } else if (name == "cv") {
    status = mgf_run_cv(cfg, &metric);
    metric_name = "aggregate_ua";
  } else {
    status = mgf_run_combine(cfg, &metric);
    metric_name = "ua";
  }
  if (status != MGF_OK) return fail_with(status);
  if (metric_name) std::printf("%s %.6f\n", metric_name, metric);
  return 0;
}
