#include "mgfusion/models/model_spec.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <map>
#include <sstream>

#include "mgfusion/common/error.hpp"

namespace mgf {

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::linear: return "linear";
    case Architecture::transformer: return "transformer";
    case Architecture::late_fusion: return "late_fusion";
    case Architecture::coattention: return "coattention";
    case Architecture::concat: return "concat";
  }
  return "?";
}

Architecture parse_architecture(std::string_view s) {
  for (Architecture a : {Architecture::linear, Architecture::transformer, Architecture::late_fusion,
                         Architecture::coattention, Architecture::concat}) {
    if (s == to_string(a)) return a;
  }
  fail(ErrorKind::config, "unknown architecture '" + std::string(s) +
                              "' (expected linear, transformer, late_fusion, coattention or concat)");
}

const std::vector<Granularity>& speech_granularity_order() {
  static const std::vector<Granularity> order = {Granularity::phone, Granularity::word, Granularity::syllable,
                                                 Granularity::frame};
  return order;
}

char granularity_letter(Granularity g) {
  switch (g) {
    case Granularity::frame: return 'F';
    case Granularity::phone: return 'P';
    case Granularity::syllable: return 'S';
    case Granularity::word: return 'W';
    case Granularity::wordpiece: return 'T';
  }
  return '?';
}

std::vector<Granularity> parse_granularity_list(std::string_view s) {
  std::vector<Granularity> found;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    std::string_view item = s.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    start = comma + 1;
    if (item.empty()) {
      if (s.empty()) break;
      fail(ErrorKind::config, "empty entry in granularity list '" + std::string(s) + "'");
    }
    Granularity g;
    if (item == "F") g = Granularity::frame;
    else if (item == "P") g = Granularity::phone;
    else if (item == "S") g = Granularity::syllable;
    else if (item == "W") g = Granularity::word;
    else fail(ErrorKind::config, "unknown granularity '" + std::string(item) + "' (expected F, P, S or W)");
    if (std::find(found.begin(), found.end(), g) != found.end()) {
      fail(ErrorKind::config, "granularity '" + std::string(item) + "' listed twice");
    }
    found.push_back(g);
  }
  std::vector<Granularity> out;
  for (Granularity g : speech_granularity_order())
    if (std::find(found.begin(), found.end(), g) != found.end()) out.push_back(g);
  return out;
}

std::string format_granularity_list(const std::vector<Granularity>& gs) {
  std::string out;
  for (Granularity g : gs) {
    if (!out.empty()) out += ',';
    out += granularity_letter(g);
  }
  return out;
}

bool ModelSpec::uses_speech(Granularity g) const {
  return std::find(granularities.begin(), granularities.end(), g) != granularities.end();
}

void ModelSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::config, what);
  };
  if (granularities != parse_granularity_list(format_granularity_list(granularities))) {
    fail(ErrorKind::config, "granularities must be distinct speech levels in P, W, S, F order");
  }
  switch (arch) {
    case Architecture::linear:
    case Architecture::transformer:
      require((text && granularities.empty()) || (!text && granularities.size() == 1),
              std::string(to_string(arch)) + " models take exactly one stream: text, or one speech granularity");
      break;
    case Architecture::late_fusion:
    case Architecture::coattention:
    case Architecture::concat:
      require(text && !granularities.empty(),
              std::string(to_string(arch)) + " needs text plus at least one speech granularity");
      break;
  }
  require(classes >= 2, "classes must be at least 2");
  require(hidden1 >= 1 && hidden2 >= 1, "hidden sizes must be positive");
  require(heads >= 1, "heads must be positive");
  require(encoder_layers >= 1, "encoder_layers must be positive");
  require(ffn_multiplier >= 1, "ffn_multiplier must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  if (dim != 0) {
    require(dim >= 2, "dim must be at least 2");
    if (transformer_based()) {
      require(dim % heads == 0, "dim " + std::to_string(dim) + " is not divisible by heads " + std::to_string(heads));
    }
  }
}

void ModelSpec::validate_complete() const {
  validate();
  if (dim == 0) fail(ErrorKind::config, "model dim is unset");
  if (text && text_layers == 0) fail(ErrorKind::config, "text layer count is unset");
  if (!granularities.empty() && speech_layers == 0) fail(ErrorKind::config, "speech layer count is unset");
}

std::string ModelSpec::serialize() const {
  char dbuf[64];
  std::snprintf(dbuf, sizeof dbuf, "%.17g", dropout);
  std::ostringstream os;
  os << "arch = " << to_string(arch) << '\n'
     << "granularities = " << format_granularity_list(granularities) << '\n'
     << "text = " << (text ? "true" : "false") << '\n'
     << "dim = " << dim << '\n'
     << "text_layers = " << text_layers << '\n'
     << "speech_layers = " << speech_layers << '\n'
     << "hidden1 = " << hidden1 << '\n'
     << "hidden2 = " << hidden2 << '\n'
     << "heads = " << heads << '\n'
     << "encoder_layers = " << encoder_layers << '\n'
     << "ffn_multiplier = " << ffn_multiplier << '\n'
     << "dropout = " << dbuf << '\n'
     << "classes = " << classes << '\n'
     << "seed = " << seed << '\n';
  return os.str();
}

ModelSpec ModelSpec::parse(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::parse, "model spec line without '=': " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto take = [&kv](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) fail(ErrorKind::parse, std::string("model spec lacks '") + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_size = [&take](const char* key) -> std::uint64_t {
    const std::string v = take(key);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      fail(ErrorKind::parse, std::string("model spec '") + key + "' is not an unsigned integer");
    }
    return out;
  };

  ModelSpec s;
  s.arch = parse_architecture(take("arch"));
  s.granularities = parse_granularity_list(take("granularities"));
  const std::string t = take("text");
  if (t != "true" && t != "false") fail(ErrorKind::parse, "model spec 'text' must be true or false");
  s.text = t == "true";
  s.dim = take_size("dim");
  s.text_layers = take_size("text_layers");
  s.speech_layers = take_size("speech_layers");
  s.hidden1 = take_size("hidden1");
  s.hidden2 = take_size("hidden2");
  s.heads = take_size("heads");
  s.encoder_layers = take_size("encoder_layers");
  s.ffn_multiplier = take_size("ffn_multiplier");
  {
    const std::string v = take("dropout");
    char* end = nullptr;
    s.dropout = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) fail(ErrorKind::parse, "model spec 'dropout' is not a number");
  }
  s.classes = take_size("classes");
  s.seed = take_size("seed");
  if (!kv.empty()) fail(ErrorKind::parse, "unknown model spec key '" + kv.begin()->first + "'");
  s.validate();
  return s;
}

}  // namespace mgf
