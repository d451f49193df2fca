#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mgfusion/dataio/synthetic.hpp"
#include "mgfusion/models/model_spec.hpp"
#include "mgfusion/training/trainer.hpp"

namespace mgf {

// Every setting a command can take. Keys double as CLI flag names.
struct RunConfig {
  SynthConfig synth;
  ModelSpec spec;
  TrainConfig train;
  std::size_t jobs = 1;

  std::string out;
  std::string manifest;
  std::string checkpoint;
  std::string checkpoint_a;
  std::string checkpoint_b;
  std::string test_session;  // held out by train, selected by eval/combine
  std::vector<Granularity> pool_levels = {Granularity::phone, Granularity::syllable, Granularity::word};

  // Unknown keys and unparsable values are config errors.
  void set(std::string_view key, std::string_view value);
  // `key = value` lines; '#' starts a comment.
  void load_text(std::string_view text, const std::string& origin = "config");
  void load_file(const std::string& path);

  struct KeyInfo {
    const char* key;
    const char* help;
  };
  static const std::vector<KeyInfo>& keys();
};

}  // namespace mgf
