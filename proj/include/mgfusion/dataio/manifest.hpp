#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mgf {

inline constexpr std::size_t kNumClasses = 4;

// Fixed label order: angry, happy, sad, neutral.
const std::array<std::string_view, kNumClasses>& label_names();
std::size_t label_index(std::string_view name);  // throws a label error

struct UtteranceRecord {
  std::string id;
  std::string session;
  std::size_t label = 0;
  std::string speech_stack_path;
  std::string text_stack_path;
  std::string alignment_path;

  bool operator==(const UtteranceRecord&) const = default;
};

// One tab-separated record per line:
//   id  session  label-name  speech-path  text-path  alignment-path
// Relative paths are resolved against base_dir. Blank lines and lines
// starting with '#' are skipped.
std::vector<UtteranceRecord> parse_manifest(std::string_view text, const std::string& base_dir = {});

// Paths are written relative to base_dir when they live underneath it.
std::string serialize_manifest(const std::vector<UtteranceRecord>& records, const std::string& base_dir = {});

std::vector<UtteranceRecord> load_manifest(const std::string& path);

// Throws a validation error naming the first record whose files are missing.
void check_manifest_files(const std::vector<UtteranceRecord>& records);

}  // namespace mgf
