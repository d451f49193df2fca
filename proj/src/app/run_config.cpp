#include "mgfusion/app/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/stack_codec.hpp"

namespace mgf {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  fail(ErrorKind::config, "'" + std::string(key) + "' expects " + expected + ", got '" + std::string(value) + "'");
}

template <class U>
U parse_unsigned(std::string_view key, std::string_view v) {
  U out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v, "a non-negative integer");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, v, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true or false");
}

// Pool tiers accept letters (P,S,W) or names (phone,syllable,word).
std::vector<Granularity> parse_pool_levels(std::string_view key, std::string_view v) {
  std::vector<Granularity> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = std::min(v.find(',', pos), v.size());
    const auto item = trim(v.substr(pos, comma - pos));
    Granularity g;
    if (item == "P" || item == "phone") g = Granularity::phone;
    else if (item == "S" || item == "syllable") g = Granularity::syllable;
    else if (item == "W" || item == "word") g = Granularity::word;
    else bad_value(key, v, "a list over phone, syllable, word");
    if (std::find(out.begin(), out.end(), g) != out.end()) bad_value(key, v, "a list without duplicates");
    out.push_back(g);
    pos = comma + 1;
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

struct Entry {
  RunConfig::KeyInfo info;
  Setter set;
};

#define MGF_SIZE(field) [](RunConfig& c, std::string_view k, std::string_view v) { field = parse_unsigned<std::size_t>(k, v); }
#define MGF_REAL(field) [](RunConfig& c, std::string_view k, std::string_view v) { field = parse_real(k, v); }
#define MGF_TEXT(field) [](RunConfig& c, std::string_view, std::string_view v) { field = std::string(v); }

const std::vector<Entry>& table() {
  static const std::vector<Entry> entries = {
      {{"out", "output directory"}, MGF_TEXT(c.out)},
      {{"manifest", "dataset manifest (TSV)"}, MGF_TEXT(c.manifest)},
      {{"checkpoint", "model checkpoint for eval"}, MGF_TEXT(c.checkpoint)},
      {{"checkpoint_a", "first checkpoint for combine"}, MGF_TEXT(c.checkpoint_a)},
      {{"checkpoint_b", "second checkpoint for combine"}, MGF_TEXT(c.checkpoint_b)},
      {{"test_session", "session held out by train and scored by eval/combine"}, MGF_TEXT(c.test_session)},
      {{"seed", "seed for every random choice of the command"},
       [](RunConfig& c, std::string_view k, std::string_view v) {
         const auto s = parse_unsigned<std::uint64_t>(k, v);
         c.synth.seed = s;
         c.train.seed = s;
         c.spec.seed = s;
       }},
      {{"jobs", "folds run in parallel by cv"}, MGF_SIZE(c.jobs)},
      // synthetic data
      {{"n", "synthetic utterance count"}, MGF_SIZE(c.synth.utterances)},
      {{"sessions", "synthetic session count"}, MGF_SIZE(c.synth.sessions)},
      {{"layers", "synthetic encoder layer count"}, MGF_SIZE(c.synth.layers)},
      {{"dim", "synthetic embedding dimension"}, MGF_SIZE(c.synth.dim)},
      {{"words_min", "fewest words per utterance"}, MGF_SIZE(c.synth.words_min)},
      {{"words_max", "most words per utterance"}, MGF_SIZE(c.synth.words_max)},
      {{"phones_min", "fewest phones per word"}, MGF_SIZE(c.synth.phones_per_word_min)},
      {{"phones_max", "most phones per word"}, MGF_SIZE(c.synth.phones_per_word_max)},
      {{"frames_min", "fewest frames per phone"}, MGF_SIZE(c.synth.frames_per_phone_min)},
      {{"frames_max", "most frames per phone"}, MGF_SIZE(c.synth.frames_per_phone_max)},
      {{"text_scale", "text class offset"}, MGF_REAL(c.synth.text_scale)},
      {{"speech_scale", "speech class offset"}, MGF_REAL(c.synth.speech_scale)},
      {{"content_scale", "per-position nuisance shared across layers"}, MGF_REAL(c.synth.content_scale)},
      {{"noise", "per-layer noise scale"}, MGF_REAL(c.synth.noise)},
      {{"wordpiece_split", "probability that a word yields two wordpieces"}, MGF_REAL(c.synth.wordpiece_split)},
      {{"scheme", "complementary or segmental"},
       [](RunConfig& c, std::string_view, std::string_view v) { c.synth.scheme = parse_synth_scheme(std::string(v)); }},
      {{"emit_syllables", "write a syllable tier into the alignments"},
       [](RunConfig& c, std::string_view k, std::string_view v) { c.synth.emit_syllables = parse_bool(k, v); }},
      // pooling
      {{"granularity", "tiers written by pool (phone,syllable,word)"},
       [](RunConfig& c, std::string_view k, std::string_view v) { c.pool_levels = parse_pool_levels(k, v); }},
      // model
      {{"arch", "linear, transformer, late_fusion, coattention or concat"},
       [](RunConfig& c, std::string_view, std::string_view v) { c.spec.arch = parse_architecture(v); }},
      {{"granularities", "speech granularities over F,P,S,W (empty for text only)"},
       [](RunConfig& c, std::string_view, std::string_view v) { c.spec.granularities = parse_granularity_list(v); }},
      {{"text", "include the text stream"},
       [](RunConfig& c, std::string_view k, std::string_view v) { c.spec.text = parse_bool(k, v); }},
      {{"hidden1", "first branch hidden size"}, MGF_SIZE(c.spec.hidden1)},
      {{"hidden2", "second branch hidden size"}, MGF_SIZE(c.spec.hidden2)},
      {{"heads", "attention heads"}, MGF_SIZE(c.spec.heads)},
      {{"encoder_layers", "transformer / coattention depth"}, MGF_SIZE(c.spec.encoder_layers)},
      {{"ffn_multiplier", "encoder feed-forward width as a multiple of the model dimension"},
       MGF_SIZE(c.spec.ffn_multiplier)},
      {{"dropout", "dropout probability after ReLU layers"}, MGF_REAL(c.spec.dropout)},
      // training
      {{"learning_rate", "Adam step size (0 = architecture default)"}, MGF_REAL(c.train.learning_rate)},
      {{"batch_size", "minibatch size"}, MGF_SIZE(c.train.batch_size)},
      {{"max_epochs", "epoch limit"}, MGF_SIZE(c.train.max_epochs)},
      {{"patience", "early-stopping patience in epochs"}, MGF_SIZE(c.train.patience)},
      {{"val_fraction", "validation share of the training pool"}, MGF_REAL(c.train.val_fraction)},
      {{"repeats", "cross-validation repeats"}, MGF_SIZE(c.train.repeats)},
  };
  return entries;
}

#undef MGF_SIZE
#undef MGF_REAL
#undef MGF_TEXT

}  // namespace

const std::vector<RunConfig::KeyInfo>& RunConfig::keys() {
  static const std::vector<KeyInfo> infos = [] {
    std::vector<KeyInfo> v;
    for (const auto& e : table()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  for (const auto& e : table()) {
    if (key == e.info.key) {
      try {
        e.set(*this, key, trim(value));
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::config) throw;
        fail(ErrorKind::config, "'" + std::string(key) + "': " + err.detail());
      }
      return;
    }
  }
  fail(ErrorKind::config, "unknown key '" + std::string(key) + "'");
}

void RunConfig::load_text(std::string_view text, const std::string& origin) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::config, origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& err) {
      fail(ErrorKind::config, origin + ":" + std::to_string(line_no) + ": " + err.detail());
    }
  }
}

void RunConfig::load_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& err) {
    fail(ErrorKind::config, err.detail());
  }
  load_text(text, path);
}

}  // namespace mgf
