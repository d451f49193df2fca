#include "mgfusion/mgfusion.h"

#include <algorithm>
#include <exception>
#include <mutex>
#include <new>
#include <string>

#include "mgfusion/app/commands.hpp"
#include "mgfusion/common/error.hpp"
#include "mgfusion/models/checkpoint.hpp"

struct mgf_config {
  mgf::RunConfig run;
};

struct mgf_model {
  mgf::Model<float> model;
};

namespace {

thread_local std::string last_error;

std::mutex log_mutex;
mgf_log_fn log_fn = nullptr;
void* log_user = nullptr;

void emit(const std::string& line) {
  std::lock_guard<std::mutex> lock(log_mutex);
  if (log_fn) log_fn(line.c_str(), log_user);
}

mgf_status status_of(mgf::ErrorKind kind) {
  using K = mgf::ErrorKind;
  switch (kind) {
    case K::config:
    case K::parameter:
      return MGF_ERR_USAGE;
    case K::numerical:
      return MGF_ERR_NUMERIC;
    case K::dimension:
    case K::empty_sequence:
    case K::label:
    case K::parse:
    case K::validation:
    case K::codec:
    case K::metric:
    case K::io:
      return MGF_ERR_DATA;
    case K::contract:
      return MGF_ERR_INTERNAL;
  }
  return MGF_ERR_INTERNAL;
}

template <class F>
mgf_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MGF_OK;
  } catch (const mgf::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    last_error = "internal error";
  }
  return MGF_ERR_INTERNAL;
}

mgf_status null_argument(const char* what) {
  last_error = std::string("config error: null ") + what;
  return MGF_ERR_USAGE;
}

}  // namespace

extern "C" {

const char* mgf_version(void) { return "1.0.0"; }

const char* mgf_last_error(void) { return last_error.c_str(); }

void mgf_set_log_callback(mgf_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(log_mutex);
  log_fn = fn;
  log_user = user;
}

mgf_status mgf_config_create(mgf_config** out) {
  if (!out) return null_argument("output pointer");
  return guarded([&] { *out = new mgf_config(); });
}

void mgf_config_destroy(mgf_config* cfg) { delete cfg; }

mgf_status mgf_config_set(mgf_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return null_argument("argument");
  return guarded([&] { cfg->run.set(key, value); });
}

mgf_status mgf_config_load_file(mgf_config* cfg, const char* path) {
  if (!cfg || !path) return null_argument("argument");
  return guarded([&] { cfg->run.load_file(path); });
}

size_t mgf_config_key_count(void) { return mgf::RunConfig::keys().size(); }

const char* mgf_config_key_name(size_t i) {
  const auto& keys = mgf::RunConfig::keys();
  return i < keys.size() ? keys[i].key : nullptr;
}

const char* mgf_config_key_help(size_t i) {
  const auto& keys = mgf::RunConfig::keys();
  return i < keys.size() ? keys[i].help : nullptr;
}

mgf_status mgf_run_synth(const mgf_config* cfg) {
  if (!cfg) return null_argument("config");
  return guarded([&] { mgf::cmd_synth(cfg->run, emit); });
}

mgf_status mgf_run_pool(const mgf_config* cfg) {
  if (!cfg) return null_argument("config");
  return guarded([&] { mgf::cmd_pool(cfg->run, emit); });
}

mgf_status mgf_run_train(const mgf_config* cfg, double* best_val_ua) {
  if (!cfg) return null_argument("config");
  return guarded([&] {
    const double v = mgf::cmd_train(cfg->run, emit);
    if (best_val_ua) *best_val_ua = v;
  });
}

mgf_status mgf_run_eval(const mgf_config* cfg, double* ua) {
  if (!cfg) return null_argument("config");
  return guarded([&] {
    const double v = mgf::cmd_eval(cfg->run, emit);
    if (ua) *ua = v;
  });
}

mgf_status mgf_run_cv(const mgf_config* cfg, double* aggregate_ua) {
  if (!cfg) return null_argument("config");
  return guarded([&] {
    const double v = mgf::cmd_cv(cfg->run, emit);
    if (aggregate_ua) *aggregate_ua = v;
  });
}

mgf_status mgf_run_combine(const mgf_config* cfg, double* ua) {
  if (!cfg) return null_argument("config");
  return guarded([&] {
    const double v = mgf::cmd_combine(cfg->run, emit);
    if (ua) *ua = v;
  });
}

mgf_status mgf_model_load(const char* path, mgf_model** out) {
  if (!path || !out) return null_argument("argument");
  return guarded([&] { *out = new mgf_model{mgf::load_checkpoint<float>(path)}; });
}

void mgf_model_destroy(mgf_model* model) { delete model; }

size_t mgf_model_class_count(const mgf_model* model) { return model ? model->model.spec().classes : 0; }

mgf_status mgf_model_predict(const mgf_model* model, const char* manifest, const char* utterance_id,
                             double* posterior, size_t capacity) {
  if (!model || !manifest || !utterance_id || !posterior) return null_argument("argument");
  return guarded([&] {
    const auto& spec = model->model.spec();
    if (capacity < spec.classes) {
      mgf::fail(mgf::ErrorKind::config, "posterior buffer holds " + std::to_string(capacity) + " values, need " +
                                            std::to_string(spec.classes));
    }
    const auto records = mgf::load_manifest(manifest);
    const auto it = std::find_if(records.begin(), records.end(),
                                 [&](const mgf::UtteranceRecord& r) { return r.id == utterance_id; });
    if (it == records.end()) {
      mgf::fail(mgf::ErrorKind::validation, std::string("utterance '") + utterance_id + "' not in the manifest");
    }
    mgf::LoadOptions options;
    options.speech_levels = {spec.granularities.begin(), spec.granularities.end()};
    options.log = emit;
    const auto example = mgf::load_example(*it, options);
    const auto p = mgf::predict(model->model, mgf::ModelInput::from_example(example));
    std::copy(p.posterior.begin(), p.posterior.end(), posterior);
  });
}

}  // extern "C"
