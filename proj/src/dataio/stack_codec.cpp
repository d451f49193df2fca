#include "mgfusion/dataio/stack_codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "mgfusion/common/error.hpp"

namespace mgf {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

[[noreturn]] void codec_fail(std::size_t offset, const std::string& what) {
  fail(ErrorKind::codec, "at offset " + std::to_string(offset) + ": " + what);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::codec, std::string(what) + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_stack(const LayeredEmbedding& stack) {
  stack.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kStackHeaderBytes + stack.data.size() * 4);
  for (char c : {'M', 'G', 'E', 'F'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u16(out, kStackFormatVersion);
  out.push_back(static_cast<std::uint8_t>(stack.modality));
  out.push_back(static_cast<std::uint8_t>(stack.granularity));
  put_u32(out, checked_u32(stack.layers, "layer count"));
  put_u32(out, checked_u32(stack.positions, "position count"));
  put_u32(out, checked_u32(stack.dim, "dimension"));
  for (float v : stack.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

LayeredEmbedding decode_stack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kStackHeaderBytes) {
    codec_fail(bytes.size(), "truncated header (" + std::to_string(bytes.size()) + " of " +
                                 std::to_string(kStackHeaderBytes) + " bytes)");
  }
  if (std::memcmp(bytes.data(), "MGEF", 4) != 0) codec_fail(0, "bad magic");
  const std::uint16_t version = static_cast<std::uint16_t>(bytes[4] | (bytes[5] << 8));
  if (version != kStackFormatVersion) codec_fail(4, "unsupported version " + std::to_string(version));
  if (bytes[6] > static_cast<std::uint8_t>(Modality::text)) {
    codec_fail(6, "unknown modality code " + std::to_string(bytes[6]));
  }
  if (bytes[7] > static_cast<std::uint8_t>(Granularity::wordpiece)) {
    codec_fail(7, "unknown granularity code " + std::to_string(bytes[7]));
  }
  const std::uint64_t layers = get_u32(bytes, 8);
  const std::uint64_t positions = get_u32(bytes, 12);
  const std::uint64_t dim = get_u32(bytes, 16);
  if (layers == 0 || positions == 0 || dim == 0) codec_fail(8, "zero extent in header");

  // Three u32 extents cannot overflow u64 when multiplied pairwise, but the
  // full product times 4 bytes can.
  const std::uint64_t lk = layers * positions;
  if (lk > std::numeric_limits<std::uint64_t>::max() / dim ||
      lk * dim > (std::numeric_limits<std::uint64_t>::max() - kStackHeaderBytes) / 4) {
    codec_fail(8, "dimension product overflows");
  }
  const std::uint64_t count = lk * dim;
  const std::uint64_t expected = kStackHeaderBytes + count * 4;
  if (bytes.size() < expected) {
    codec_fail(bytes.size(), "truncated payload: header announces " + std::to_string(count) +
                                 " values (" + std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected) codec_fail(expected, "trailing bytes after payload");

  LayeredEmbedding out;
  out.modality = static_cast<Modality>(bytes[6]);
  out.granularity = static_cast<Granularity>(bytes[7]);
  out.layers = layers;
  out.positions = positions;
  out.dim = dim;
  out.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kStackHeaderBytes + 4 * i;
    const float v = std::bit_cast<float>(get_u32(bytes, at));
    if (!std::isfinite(v)) codec_fail(at, "non-finite value");
    out.data[i] = v;
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  write_binary_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                        text.size()));
}

void write_stack_file(const std::string& path, const LayeredEmbedding& stack) {
  write_binary_file(path, encode_stack(stack));
}

LayeredEmbedding read_stack_file(const std::string& path) {
  const auto bytes = read_binary_file(path);
  try {
    return decode_stack(bytes);
  } catch (const Error& e) {
    fail(e.kind(), "'" + path + "': " + e.detail());
  }
}

}  // namespace mgf
