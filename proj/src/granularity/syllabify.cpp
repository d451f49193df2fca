#include "mgfusion/granularity/syllabify.hpp"

#include <cctype>

namespace mgf {

const std::set<std::string>& arpabet_vowels() {
  static const std::set<std::string> vowels = {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
                                               "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
  return vowels;
}

std::string strip_stress(const std::string& phone) {
  std::size_t n = phone.size();
  while (n > 0 && std::isdigit(static_cast<unsigned char>(phone[n - 1]))) --n;
  return phone.substr(0, n);
}

std::vector<Segment> syllabify(const std::vector<Segment>& phones, const std::set<std::string>& vowels) {
  std::vector<Segment> out;
  if (phones.empty()) return out;

  // Index of the first phone of every syllable.
  std::vector<std::size_t> starts;
  bool seen_nucleus = false;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (!vowels.count(strip_stress(phones[i].label))) continue;
    if (!seen_nucleus) {
      starts.push_back(0);
      seen_nucleus = true;
    } else {
      // Onset of this syllable: every consonant after the previous nucleus.
      std::size_t prev_nucleus = i - 1;
      while (!vowels.count(strip_stress(phones[prev_nucleus].label))) --prev_nucleus;
      starts.push_back(prev_nucleus + 1);
    }
  }
  if (starts.empty()) starts.push_back(0);

  for (std::size_t j = 0; j < starts.size(); ++j) {
    const std::size_t first = starts[j];
    const std::size_t last = j + 1 < starts.size() ? starts[j + 1] : phones.size();
    Segment s;
    s.start = phones[first].start;
    s.end = j + 1 < starts.size() ? phones[last].start : phones.back().end;
    for (std::size_t i = first; i < last; ++i) {
      if (i > first) s.label += '-';
      s.label += phones[i].label;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Segment> syllabify_tiers(const AlignmentTiers& tiers, const std::set<std::string>& vowels) {
  std::vector<Segment> out;
  const auto& phones = tiers.phones;
  const auto& words = tiers.words;

  auto word_of = [&words](const Segment& p) -> long {
    for (std::size_t w = 0; w < words.size(); ++w)
      if (p.start >= words[w].start && p.start < words[w].end) return static_cast<long>(w);
    return -1;
  };

  std::size_t i = 0;
  while (i < phones.size()) {
    const long w = word_of(phones[i]);
    std::vector<Segment> group;
    while (i < phones.size() && word_of(phones[i]) == w) group.push_back(phones[i++]);
    for (auto& s : syllabify(group, vowels)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mgf
