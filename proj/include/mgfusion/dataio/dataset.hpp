#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mgfusion/dataio/manifest.hpp"
#include "mgfusion/granularity/alignment.hpp"
#include "mgfusion/granularity/layered_embedding.hpp"
#include "mgfusion/granularity/syllabify.hpp"

namespace mgf {

using LogSink = std::function<void(const std::string&)>;

// One utterance ready for the models: the text stack plus speech stacks at
// every requested granularity (frame, phone, syllable, word).
struct Example {
  std::string id;
  std::string session;
  std::size_t label = 0;
  LayeredEmbedding text;
  std::map<Granularity, LayeredEmbedding> speech;
};

struct LoadOptions {
  std::set<Granularity> speech_levels = {Granularity::frame};
  std::set<std::string> vowels = arpabet_vowels();
  LogSink log;
};

// Pools segment-level stacks for `levels` out of a frame stack. A missing
// syllable tier falls back to syllabify_tiers() and is reported via `log`.
std::map<Granularity, LayeredEmbedding> derive_speech_levels(const LayeredEmbedding& frames,
                                                             const AlignmentTiers& tiers,
                                                             const std::set<Granularity>& levels,
                                                             const std::set<std::string>& vowels,
                                                             const LogSink& log);

Example load_example(const UtteranceRecord& record, const LoadOptions& options);
std::vector<Example> load_examples(const std::vector<UtteranceRecord>& records, const LoadOptions& options);

}  // namespace mgf
