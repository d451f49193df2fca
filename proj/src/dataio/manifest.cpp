#include "mgfusion/dataio/manifest.hpp"

#include <filesystem>
#include <set>
#include <sstream>

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/stack_codec.hpp"

namespace fs = std::filesystem;

namespace mgf {
namespace {

std::string resolve(const std::string& base_dir, std::string_view p) {
  fs::path path{std::string(p)};
  if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
  return path.lexically_normal().string();
}

std::string relativize(const std::string& base_dir, const std::string& p) {
  if (base_dir.empty()) return p;
  const fs::path rel = fs::path(p).lexically_relative(fs::path(base_dir).lexically_normal());
  if (rel.empty() || *rel.begin() == "..") return p;
  return rel.string();
}

}  // namespace

const std::array<std::string_view, kNumClasses>& label_names() {
  static const std::array<std::string_view, kNumClasses> names = {"angry", "happy", "sad", "neutral"};
  return names;
}

std::size_t label_index(std::string_view name) {
  const auto& names = label_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  fail(ErrorKind::label, "unknown label '" + std::string(name) + "'");
}

std::vector<UtteranceRecord> parse_manifest(std::string_view text, const std::string& base_dir) {
  std::vector<UtteranceRecord> records;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    const std::string where = "manifest line " + std::to_string(line_no) + ": ";
    if (fields.size() != 6) {
      fail(ErrorKind::parse, where + "expected 6 tab-separated fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) fail(ErrorKind::parse, where + "field " + std::to_string(i + 1) + " is empty");
    }
    UtteranceRecord r;
    r.id = std::string(fields[0]);
    r.session = std::string(fields[1]);
    try {
      r.label = label_index(fields[2]);
    } catch (const Error&) {
      fail(ErrorKind::parse, where + "unknown label '" + std::string(fields[2]) + "'");
    }
    r.speech_stack_path = resolve(base_dir, fields[3]);
    r.text_stack_path = resolve(base_dir, fields[4]);
    r.alignment_path = resolve(base_dir, fields[5]);
    if (!ids.insert(r.id).second) fail(ErrorKind::parse, where + "duplicate utterance id '" + r.id + "'");
    records.push_back(std::move(r));
  }
  return records;
}

std::string serialize_manifest(const std::vector<UtteranceRecord>& records, const std::string& base_dir) {
  std::ostringstream os;
  for (const auto& r : records) {
    os << r.id << '\t' << r.session << '\t' << label_names().at(r.label) << '\t'
       << relativize(base_dir, r.speech_stack_path) << '\t' << relativize(base_dir, r.text_stack_path) << '\t'
       << relativize(base_dir, r.alignment_path) << '\n';
  }
  return os.str();
}

std::vector<UtteranceRecord> load_manifest(const std::string& path) {
  const std::string dir = fs::path(path).parent_path().string();
  return parse_manifest(read_text_file(path), dir);
}

void check_manifest_files(const std::vector<UtteranceRecord>& records) {
  for (const auto& r : records) {
    for (const std::string* p : {&r.speech_stack_path, &r.text_stack_path, &r.alignment_path}) {
      if (!fs::exists(*p)) fail(ErrorKind::validation, "utterance '" + r.id + "': missing file '" + *p + "'");
    }
  }
}

}  // namespace mgf
