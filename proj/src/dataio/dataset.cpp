#include "mgfusion/dataio/dataset.hpp"

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/stack_codec.hpp"
#include "mgfusion/granularity/pooling.hpp"

namespace mgf {

std::map<Granularity, LayeredEmbedding> derive_speech_levels(const LayeredEmbedding& frames,
                                                             const AlignmentTiers& tiers,
                                                             const std::set<Granularity>& levels,
                                                             const std::set<std::string>& vowels,
                                                             const LogSink& log) {
  std::map<Granularity, LayeredEmbedding> out;
  const std::string& id = tiers.utterance_id;
  for (Granularity g : levels) {
    switch (g) {
      case Granularity::frame:
        out[g] = frames;
        break;
      case Granularity::phone:
        if (tiers.phones.empty()) fail(ErrorKind::validation, "utterance '" + id + "' has no phone tier");
        out[g] = pool_segments(frames, tiers.phones, g);
        break;
      case Granularity::word:
        if (tiers.words.empty()) fail(ErrorKind::validation, "utterance '" + id + "' has no word tier");
        out[g] = pool_segments(frames, tiers.words, g);
        break;
      case Granularity::syllable:
        if (tiers.syllables && !tiers.syllables->empty()) {
          out[g] = pool_segments(frames, *tiers.syllables, g);
        } else {
          if (tiers.phones.empty()) {
            fail(ErrorKind::validation, "utterance '" + id + "' has neither a syllable nor a phone tier");
          }
          if (log) log("utterance '" + id + "': no syllable tier, syllables derived from phones");
          out[g] = pool_segments(frames, syllabify_tiers(tiers, vowels), g);
        }
        break;
      case Granularity::wordpiece:
        fail(ErrorKind::validation, "wordpiece is a text granularity");
    }
  }
  return out;
}

Example load_example(const UtteranceRecord& record, const LoadOptions& options) {
  Example ex;
  ex.id = record.id;
  ex.session = record.session;
  ex.label = record.label;
  if (ex.label >= kNumClasses) fail(ErrorKind::label, "utterance '" + record.id + "' has label out of range");

  LayeredEmbedding frames = read_stack_file(record.speech_stack_path);
  if (frames.modality != Modality::speech || frames.granularity != Granularity::frame) {
    fail(ErrorKind::validation, "utterance '" + record.id + "': speech stack must be frame-level speech");
  }
  ex.text = read_stack_file(record.text_stack_path);
  if (ex.text.modality != Modality::text) {
    fail(ErrorKind::validation, "utterance '" + record.id + "': text stack has speech modality");
  }

  std::vector<std::string> warnings;
  AlignmentTiers tiers;
  try {
    tiers = parse_alignment(read_text_file(record.alignment_path), frames.positions, &warnings, record.id);
  } catch (const Error& e) {
    fail(e.kind(), "utterance '" + record.id + "': " + e.detail());
  }
  if (options.log)
    for (const auto& w : warnings) options.log("utterance '" + record.id + "': " + w);

  ex.speech = derive_speech_levels(frames, tiers, options.speech_levels, options.vowels, options.log);
  return ex;
}

std::vector<Example> load_examples(const std::vector<UtteranceRecord>& records, const LoadOptions& options) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(load_example(r, options));
  return out;
}

}  // namespace mgf
