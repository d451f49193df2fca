#include "mgfusion/dataio/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>

#include "mgfusion/common/error.hpp"
#include "mgfusion/common/rng.hpp"
#include "mgfusion/dataio/stack_codec.hpp"
#include "mgfusion/granularity/syllabify.hpp"

namespace fs = std::filesystem;

namespace mgf {
namespace {

constexpr std::uint64_t kDirectionStream = 0xD1;
constexpr std::uint64_t kPlanStream = 0x9A;
constexpr std::uint64_t kUtteranceStream = 0x17;

const std::vector<std::string>& consonants() {
  static const std::vector<std::string> c = {"B", "D", "F", "G", "K", "L", "M", "N", "P", "R", "S", "T", "V", "Z"};
  return c;
}

const std::vector<std::string>& vowel_symbols() {
  static const std::vector<std::string> v = {"AA", "AE", "AH", "EH", "IH", "IY", "OW", "UW"};
  return v;
}

std::size_t uniform_count(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<double> gaussian_vector(Rng& rng, std::size_t n, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = scale * normal(rng);
  return v;
}

double layer_gain(std::size_t l, std::size_t layers) {
  return layers == 1 ? 1.0 : 0.5 + static_cast<double>(l) / static_cast<double>(layers - 1);
}

// Class offsets along the text / speech directions.
double text_sign(std::size_t label) { return label == 0 ? 1.0 : label == 1 ? -1.0 : 0.0; }
double speech_sign(std::size_t label) { return label == 2 ? 1.0 : label == 3 ? -1.0 : 0.0; }

std::string utterance_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "utt%05zu", index);
  return buf;
}

std::string session_name(std::size_t s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Ses%02zu", s + 1);
  return buf;
}

}  // namespace

const char* to_string(SynthScheme s) {
  return s == SynthScheme::complementary ? "complementary" : "segmental";
}

SynthScheme parse_synth_scheme(const std::string& s) {
  if (s == "complementary") return SynthScheme::complementary;
  if (s == "segmental") return SynthScheme::segmental;
  fail(ErrorKind::config, "unknown synthetic scheme '" + s + "' (expected complementary or segmental)");
}

void SynthConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::config, what);
  };
  require(sessions >= 1, "sessions must be at least 1");
  require(utterances >= sessions * kNumClasses,
          "utterance count " + std::to_string(utterances) + " is below sessions x classes = " +
              std::to_string(sessions * kNumClasses));
  require(layers >= 1, "layers must be at least 1");
  require(dim >= 2, "dim must be at least 2");
  require(words_min >= 1 && words_min <= words_max, "word range must satisfy 1 <= min <= max");
  require(phones_per_word_min >= 1 && phones_per_word_min <= phones_per_word_max,
          "phones-per-word range must satisfy 1 <= min <= max");
  require(frames_per_phone_min >= 1 && frames_per_phone_min <= frames_per_phone_max,
          "frames-per-phone range must satisfy 1 <= min <= max");
  require(text_scale >= 0 && speech_scale >= 0 && content_scale >= 0 && noise >= 0, "scales must be non-negative");
  require(wordpiece_split >= 0 && wordpiece_split <= 1, "wordpiece_split must lie in [0, 1]");
  for (double w : class_weights) require(w > 0, "class weights must be positive");
}

std::array<std::size_t, kNumClasses> synthetic_class_counts(const SynthConfig& cfg) {
  const double total_weight = std::accumulate(cfg.class_weights.begin(), cfg.class_weights.end(), 0.0);
  std::array<std::size_t, kNumClasses> counts{};
  std::array<double, kNumClasses> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double exact = cfg.class_weights[c] * static_cast<double>(cfg.utterances) / total_weight;
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += counts[c];
  }
  std::array<std::size_t, kNumClasses> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < cfg.utterances; ++i, ++assigned) ++counts[order[i % kNumClasses]];

  // Every session must see every class.
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    while (counts[c] < cfg.sessions) {
      const auto donor = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      --counts[donor];
      ++counts[c];
    }
  }
  return counts;
}

SignalDirections synthetic_directions(const SynthConfig& cfg) {
  Rng rng = make_rng(cfg.seed, kDirectionStream);
  auto normalize = [](std::vector<double>& v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  };
  SignalDirections d;
  d.text = gaussian_vector(rng, cfg.dim, 1.0);
  normalize(d.text);
  d.speech = gaussian_vector(rng, cfg.dim, 1.0);
  double dot = 0;
  for (std::size_t i = 0; i < cfg.dim; ++i) dot += d.speech[i] * d.text[i];
  for (std::size_t i = 0; i < cfg.dim; ++i) d.speech[i] -= dot * d.text[i];
  normalize(d.speech);
  return d;
}

SyntheticPlan synthetic_plan(const SynthConfig& cfg) {
  const auto counts = synthetic_class_counts(cfg);
  SyntheticPlan plan;
  for (std::size_t c = 0; c < kNumClasses; ++c) plan.labels.insert(plan.labels.end(), counts[c], c);
  Rng rng = make_rng(cfg.seed, kPlanStream);
  std::shuffle(plan.labels.begin(), plan.labels.end(), rng);
  std::array<std::size_t, kNumClasses> seen{};
  for (std::size_t label : plan.labels) plan.sessions.push_back(session_name(seen[label]++ % cfg.sessions));
  return plan;
}

SyntheticUtterance synthesize_utterance(const SynthConfig& cfg, const SignalDirections& dirs, std::size_t index,
                                        std::size_t label) {
  Rng rng = make_rng(cfg.seed, kUtteranceStream, index);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution is_vowel(0.4);
  std::bernoulli_distribution split(cfg.wordpiece_split);
  std::bernoulli_distribution coin(0.5);

  SyntheticUtterance u;
  u.label = label;
  u.alignment.utterance_id = utterance_id(index);
  u.alignment.stride_ms = kDefaultStrideMs;

  // Word / phone structure with contiguous frames.
  const std::size_t n_words = uniform_count(rng, cfg.words_min, cfg.words_max);
  std::size_t frame = 0;
  std::size_t wordpieces = 0;
  for (std::size_t w = 0; w < n_words; ++w) {
    const std::size_t n_phones = uniform_count(rng, cfg.phones_per_word_min, cfg.phones_per_word_max);
    const std::size_t word_start = frame;
    std::vector<bool> vowel(n_phones);
    bool any_vowel = false;
    for (std::size_t p = 0; p < n_phones; ++p) any_vowel |= (vowel[p] = is_vowel(rng));
    if (!any_vowel && coin(rng)) vowel[uniform_count(rng, 0, n_phones - 1)] = true;
    for (std::size_t p = 0; p < n_phones; ++p) {
      const auto& pool = vowel[p] ? vowel_symbols() : consonants();
      const std::string label_str = pool[uniform_count(rng, 0, pool.size() - 1)];
      const std::size_t len = uniform_count(rng, cfg.frames_per_phone_min, cfg.frames_per_phone_max);
      u.alignment.phones.push_back(Segment{frame, frame + len, label_str});
      frame += len;
    }
    u.alignment.words.push_back(Segment{word_start, frame, "w" + std::to_string(w)});
    wordpieces += split(rng) ? 2 : 1;
  }
  const std::size_t n_frames = frame;
  const auto syllables = syllabify_tiers(u.alignment);
  if (cfg.emit_syllables) u.alignment.syllables = syllables;

  const std::size_t L = cfg.layers, D = cfg.dim;

  // Text: class offset plus per-wordpiece content, spread over layers with
  // layer-dependent gain and independent per-layer noise.
  u.text = LayeredEmbedding(Modality::text, Granularity::wordpiece, L, wordpieces, D);
  for (std::size_t k = 0; k < wordpieces; ++k) {
    auto base = gaussian_vector(rng, D, cfg.content_scale);
    const double t = text_sign(label) * cfg.text_scale;
    for (std::size_t d = 0; d < D; ++d) base[d] += t * dirs.text[d];
    for (std::size_t l = 0; l < L; ++l) {
      const double g = layer_gain(l, L);
      auto row = u.text.row(l, k);
      for (std::size_t d = 0; d < D; ++d) row[d] = static_cast<float>(g * base[d] + cfg.noise * normal(rng));
    }
  }

  // Speech: a mean vector per segment, frames scattered around it.
  std::vector<std::vector<double>> frame_mean(n_frames, std::vector<double>(D, 0.0));
  if (cfg.scheme == SynthScheme::complementary) {
    const double s = speech_sign(label) * cfg.speech_scale;
    for (const auto& ph : u.alignment.phones) {
      const double amp = s * (1.0 + 0.25 * normal(rng));
      auto jitter = gaussian_vector(rng, D, 0.5 * cfg.content_scale);
      for (std::size_t f = ph.start; f < ph.end; ++f)
        for (std::size_t d = 0; d < D; ++d) frame_mean[f][d] = amp * dirs.speech[d] + jitter[d];
    }
  } else {
    for (const auto& syl : syllables) {
      const double amp = label == 2 ? (coin(rng) ? 1.0 : -1.0) * cfg.speech_scale : 0.0;
      for (std::size_t f = syl.start; f < syl.end; ++f)
        for (std::size_t d = 0; d < D; ++d) frame_mean[f][d] = amp * dirs.speech[d];
    }
    if (label != 2) {
      for (std::size_t f = 0; f < n_frames; ++f) {
        const double extra = cfg.speech_scale * normal(rng);
        for (std::size_t d = 0; d < D; ++d) frame_mean[f][d] += extra * dirs.speech[d];
      }
    }
  }

  u.speech = LayeredEmbedding(Modality::speech, Granularity::frame, L, n_frames, D);
  for (std::size_t f = 0; f < n_frames; ++f) {
    auto base = gaussian_vector(rng, D, cfg.content_scale);
    for (std::size_t d = 0; d < D; ++d) base[d] += frame_mean[f][d];
    for (std::size_t l = 0; l < L; ++l) {
      const double g = layer_gain(l, L);
      auto row = u.speech.row(l, f);
      for (std::size_t d = 0; d < D; ++d) row[d] = static_cast<float>(g * base[d] + cfg.noise * normal(rng));
    }
  }
  return u;
}

std::vector<UtteranceRecord> generate_synthetic(const SynthConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  const SyntheticPlan plan = synthetic_plan(cfg);
  const SignalDirections dirs = synthetic_directions(cfg);
  const fs::path root(out_dir);
  fs::create_directories(root);

  std::vector<UtteranceRecord> records;
  records.reserve(plan.labels.size());
  for (std::size_t i = 0; i < plan.labels.size(); ++i) {
    const SyntheticUtterance u = synthesize_utterance(cfg, dirs, i, plan.labels[i]);
    UtteranceRecord r;
    r.id = u.alignment.utterance_id;
    r.session = plan.sessions[i];
    r.label = u.label;
    r.speech_stack_path = (root / "speech" / (r.id + ".mgef")).string();
    r.text_stack_path = (root / "text" / (r.id + ".mgef")).string();
    r.alignment_path = (root / "align" / (r.id + ".ali")).string();
    write_stack_file(r.speech_stack_path, u.speech);
    write_stack_file(r.text_stack_path, u.text);
    write_text_file(r.alignment_path, serialize_alignment(u.alignment));
    records.push_back(std::move(r));
  }
  write_text_file((root / "manifest.tsv").string(), serialize_manifest(records, root.string()));
  return records;
}

}  // namespace mgf
