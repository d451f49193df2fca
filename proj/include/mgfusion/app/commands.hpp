#pragma once

#include <string>

#include "mgfusion/app/run_config.hpp"
#include "mgfusion/dataio/dataset.hpp"

namespace mgf {

// Writes the synthetic dataset to cfg.out. Returns the utterance count.
std::size_t cmd_synth(const RunConfig& cfg, const LogSink& log);

// Pools every frame stack in cfg.manifest to the tiers in cfg.pool_levels,
// writing <out>/<id>.<granularity>.mgef plus <out>/pool.log.
std::size_t cmd_pool(const RunConfig& cfg, const LogSink& log);

// Trains on the manifest minus cfg.test_session with a seeded validation
// draw; writes <out>/model.mgck and <out>/history.json. Returns the best
// validation UA.
double cmd_train(const RunConfig& cfg, const LogSink& log);

// Scores cfg.checkpoint on the manifest (restricted to cfg.test_session when
// set). Writes <out>/eval.json when cfg.out is set. Returns the UA.
double cmd_eval(const RunConfig& cfg, const LogSink& log);

// Writes <out>/folds/*.json and <out>/summary.json. Returns the aggregate UA.
double cmd_cv(const RunConfig& cfg, const LogSink& log);

// Averages the logits of cfg.checkpoint_a and cfg.checkpoint_b. Writes
// <out>/combine.json when cfg.out is set. Returns the UA.
double cmd_combine(const RunConfig& cfg, const LogSink& log);

}  // namespace mgf
