#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mgfusion/dataio/manifest.hpp"
#include "mgfusion/granularity/alignment.hpp"
#include "mgfusion/granularity/layered_embedding.hpp"

namespace mgf {

// complementary: text separates {angry, happy} and merges {sad, neutral};
//   speech does the opposite through per-phone mean offsets.
// segmental: as complementary for text, but the speech signal for "sad" is
//   a random-sign offset per syllable, and every other class receives
//   per-frame noise of matching variance along the signal direction. The
//   frame-level mean and variance carry no class information; only
//   segment-level averages do.
enum class SynthScheme { complementary, segmental };

const char* to_string(SynthScheme s);
SynthScheme parse_synth_scheme(const std::string& s);

struct SynthConfig {
  std::size_t utterances = 400;
  std::size_t sessions = 5;
  std::size_t layers = 12;
  std::size_t dim = 32;
  std::size_t words_min = 3;
  std::size_t words_max = 8;
  std::size_t phones_per_word_min = 1;
  std::size_t phones_per_word_max = 4;
  std::size_t frames_per_phone_min = 2;
  std::size_t frames_per_phone_max = 6;
  double text_scale = 3.0;
  double speech_scale = 2.0;
  double content_scale = 1.0;  // per-position nuisance shared across layers
  double noise = 1.0;          // independent per-layer noise
  double wordpiece_split = 0.3;
  SynthScheme scheme = SynthScheme::complementary;
  bool emit_syllables = false;
  std::array<double, kNumClasses> class_weights = {1103, 1636, 1084, 1708};
  std::uint64_t seed = 0;

  void validate() const;  // throws a config error
};

// Per-class utterance counts: weights scaled to `utterances` by largest
// remainder, with every class raised to at least `sessions`.
std::array<std::size_t, kNumClasses> synthetic_class_counts(const SynthConfig& cfg);

struct SyntheticUtterance {
  std::size_t label = 0;
  LayeredEmbedding speech;  // frame level
  LayeredEmbedding text;    // wordpiece level
  AlignmentTiers alignment;
};

struct SignalDirections {
  std::vector<double> text;
  std::vector<double> speech;  // orthogonal to text
};

SignalDirections synthetic_directions(const SynthConfig& cfg);

// Deterministic in (cfg.seed, index).
SyntheticUtterance synthesize_utterance(const SynthConfig& cfg, const SignalDirections& dirs, std::size_t index,
                                        std::size_t label);

// Labels and sessions for every utterance index.
struct SyntheticPlan {
  std::vector<std::size_t> labels;
  std::vector<std::string> sessions;
};
SyntheticPlan synthetic_plan(const SynthConfig& cfg);

// Writes manifest.tsv, speech/, text/ and align/ under out_dir.
std::vector<UtteranceRecord> generate_synthetic(const SynthConfig& cfg, const std::string& out_dir);

}  // namespace mgf
