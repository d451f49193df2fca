#include "mgfusion/granularity/alignment.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "mgfusion/common/error.hpp"

namespace mgf {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t begin = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > begin) out.push_back(line.substr(begin, i - begin));
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

void check_tier(const std::vector<Segment>& tier, const char* name, std::size_t frame_count) {
  for (std::size_t i = 0; i < tier.size(); ++i) {
    const Segment& s = tier[i];
    if (s.end <= s.start) {
      fail(ErrorKind::validation, std::string(name) + " segment " + std::to_string(i) + " is empty or reversed");
    }
    if (s.end > frame_count) {
      fail(ErrorKind::validation, std::string(name) + " segment " + std::to_string(i) + " ends at frame " +
                                      std::to_string(s.end) + " beyond " + std::to_string(frame_count));
    }
    if (i > 0) {
      const Segment& prev = tier[i - 1];
      if (s.start < prev.start) {
        fail(ErrorKind::validation, std::string(name) + " tier is not ordered by start frame at segment " +
                                        std::to_string(i));
      }
      if (s.start < prev.end) {
        fail(ErrorKind::validation, std::string(name) + " segments " + std::to_string(i - 1) + " and " +
                                        std::to_string(i) + " overlap");
      }
    }
  }
}

}  // namespace

void validate_alignment(const AlignmentTiers& tiers, std::size_t frame_count) {
  check_tier(tiers.phones, "phone", frame_count);
  check_tier(tiers.words, "word", frame_count);
  if (tiers.syllables) {
    check_tier(*tiers.syllables, "syllable", frame_count);
    std::set<std::size_t> boundaries;
    for (const auto& p : tiers.phones) {
      boundaries.insert(p.start);
      boundaries.insert(p.end);
    }
    for (std::size_t i = 0; i < tiers.syllables->size(); ++i) {
      const Segment& s = (*tiers.syllables)[i];
      if (!boundaries.count(s.start) || !boundaries.count(s.end)) {
        fail(ErrorKind::validation, "syllable segment " + std::to_string(i) + " [" + std::to_string(s.start) +
                                        ", " + std::to_string(s.end) + ") does not fall on phone boundaries");
      }
    }
  }
}

AlignmentTiers parse_alignment(std::string_view text, std::size_t frame_count,
                               std::vector<std::string>* warnings, std::string utterance_id) {
  AlignmentTiers tiers;
  tiers.utterance_id = std::move(utterance_id);
  std::size_t line_no = 0;
  bool seen_segment = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0].front() == '#') {
      if (tokens[0] == "#stride_ms") {
        int stride = 0;
        if (tokens.size() != 2 || !parse_int(tokens[1], stride) || stride <= 0) {
          fail(ErrorKind::parse, at_line(line_no) + "malformed #stride_ms header");
        }
        if (seen_segment || tiers.stride_ms) {
          fail(ErrorKind::parse, at_line(line_no) + "#stride_ms must appear once, before any segment");
        }
        tiers.stride_ms = stride;
      }
      continue;
    }
    if (tokens.size() != 4) {
      fail(ErrorKind::parse, at_line(line_no) + "expected '<tier> <start> <end> <label>', got " +
                                 std::to_string(tokens.size()) + " fields");
    }
    std::size_t start = 0, end = 0;
    if (!parse_int(tokens[1], start) || !parse_int(tokens[2], end)) {
      fail(ErrorKind::parse, at_line(line_no) + "frame indices must be non-negative decimal integers");
    }
    std::vector<Segment>* tier = nullptr;
    if (tokens[0] == "phone") {
      tier = &tiers.phones;
    } else if (tokens[0] == "word") {
      tier = &tiers.words;
    } else if (tokens[0] == "syllable") {
      if (!tiers.syllables) tiers.syllables.emplace();
      tier = &*tiers.syllables;
    } else {
      fail(ErrorKind::parse, at_line(line_no) + "unknown tier '" + std::string(tokens[0]) + "'");
    }
    seen_segment = true;
    if (end <= start) {
      fail(ErrorKind::validation, at_line(line_no) + "segment [" + std::to_string(start) + ", " +
                                      std::to_string(end) + ") is empty");
    }
    if (start >= frame_count) {
      if (warnings) {
        warnings->push_back(at_line(line_no) + std::string(tokens[0]) + " segment starts at frame " +
                            std::to_string(start) + " beyond " + std::to_string(frame_count) + "; dropped");
      }
      continue;
    }
    if (end > frame_count) {
      if (warnings) {
        warnings->push_back(at_line(line_no) + std::string(tokens[0]) + " segment end " + std::to_string(end) +
                            " clipped to " + std::to_string(frame_count));
      }
      end = frame_count;
    }
    tier->push_back(Segment{start, end, std::string(tokens[3])});
  }
  if (tiers.syllables && tiers.syllables->empty()) tiers.syllables.reset();
  validate_alignment(tiers, frame_count);
  return tiers;
}

std::string serialize_alignment(const AlignmentTiers& tiers) {
  std::ostringstream os;
  if (tiers.stride_ms) os << "#stride_ms " << *tiers.stride_ms << '\n';
  auto emit = [&os](const char* name, const std::vector<Segment>& tier) {
    for (const auto& s : tier) os << name << ' ' << s.start << ' ' << s.end << ' ' << s.label << '\n';
  };
  emit("phone", tiers.phones);
  emit("word", tiers.words);
  if (tiers.syllables) emit("syllable", *tiers.syllables);
  return os.str();
}

std::size_t seconds_to_frame(double seconds, int stride_ms) {
  if (stride_ms <= 0) fail(ErrorKind::parameter, "stride_ms must be positive");
  if (!(seconds >= 0.0)) fail(ErrorKind::parameter, "time must be non-negative");
  return static_cast<std::size_t>(std::floor(seconds * 1000.0 / stride_ms + 1e-9));
}

}  // namespace mgf
