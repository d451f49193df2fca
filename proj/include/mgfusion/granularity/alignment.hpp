#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mgf {

// Half-open frame span [start, end).
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string label;

  std::size_t length() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

struct AlignmentTiers {
  std::string utterance_id;
  std::optional<int> stride_ms;  // set when the file carries a #stride_ms header
  std::vector<Segment> phones;
  std::vector<Segment> words;
  std::optional<std::vector<Segment>> syllables;

  bool operator==(const AlignmentTiers&) const = default;
};

inline constexpr int kDefaultStrideMs = 20;

// Parses the line-oriented alignment format:
//   #stride_ms <int>                       (optional header)
//   <tier> <start_frame> <end_frame> <label>
// with tier in {phone, word, syllable}. Other '#' lines are comments.
// Segments reaching past frame_count are clipped and reported through
// `warnings`; segments starting at or after frame_count are dropped.
AlignmentTiers parse_alignment(std::string_view text, std::size_t frame_count,
                               std::vector<std::string>* warnings = nullptr,
                               std::string utterance_id = {});

std::string serialize_alignment(const AlignmentTiers& tiers);

// Checks ordering, overlap and range of every tier, and that syllable
// boundaries fall on phone boundaries.
void validate_alignment(const AlignmentTiers& tiers, std::size_t frame_count);

// floor(t / stride).
std::size_t seconds_to_frame(double seconds, int stride_ms = kDefaultStrideMs);

}  // namespace mgf
