#include "mgfusion/models/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "mgfusion/common/error.hpp"
#include "mgfusion/dataio/stack_codec.hpp"

namespace mgf {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_bytes(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::uint32_t u32() {
    need(4, "u32");
    const std::uint32_t v = static_cast<std::uint32_t>(bytes_[pos_]) | (static_cast<std::uint32_t>(bytes_[pos_ + 1]) << 8) |
                            (static_cast<std::uint32_t>(bytes_[pos_ + 2]) << 16) |
                            (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }

  std::string str() {
    const std::uint32_t n = u32();
    need(n, "string");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      fail(ErrorKind::codec, "checkpoint truncated at offset " + std::to_string(pos_) + " while reading " + what);
    }
  }

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

template <class T>
std::vector<std::uint8_t> encode_checkpoint(const Model<T>& model) {
  std::vector<std::uint8_t> out = {'M', 'G', 'C', 'K'};
  put_u32(out, kCheckpointVersion);
  put_bytes(out, model.spec().serialize());
  const auto& entries = model.parameters().entries();
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, tensor] : entries) {
    put_bytes(out, name);
    put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
    for (std::size_t e : tensor.shape()) put_u32(out, static_cast<std::uint32_t>(e));
    for (T v : tensor.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

template <class T>
Model<T> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.need(4, "magic");
  if (std::memcmp(bytes.data(), "MGCK", 4) != 0) fail(ErrorKind::codec, "checkpoint has bad magic");
  in.u32();  // magic, already checked
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) fail(ErrorKind::codec, "unsupported checkpoint version " + std::to_string(version));

  ModelSpec spec;
  try {
    spec = ModelSpec::parse(in.str());
  } catch (const Error& e) {
    fail(ErrorKind::validation, std::string("checkpoint model spec rejected: ") + e.detail());
  }
  Model<T> model(spec);
  auto& store = model.parameters();

  const std::uint32_t count = in.u32();
  if (count != store.size()) {
    fail(ErrorKind::validation, "checkpoint holds " + std::to_string(count) + " parameters, the spec defines " +
                                    std::to_string(store.size()));
  }
  std::vector<bool> seen(store.size(), false);
  for (std::uint32_t p = 0; p < count; ++p) {
    const std::string name = in.str();
    const std::uint32_t rank = in.u32();
    Shape shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(in.u32());
    const auto& entries = store.entries();
    std::size_t index = entries.size();
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].first == name) index = i;
    if (index == entries.size()) fail(ErrorKind::validation, "checkpoint parameter '" + name + "' is not part of the spec");
    if (seen[index]) fail(ErrorKind::validation, "checkpoint repeats parameter '" + name + "'");
    seen[index] = true;
    diff::Tensor<T>& tensor = store.at(name);
    if (tensor.shape() != shape) {
      fail(ErrorKind::validation, "checkpoint parameter '" + name + "' has shape " + shape_to_string(shape) +
                                      ", the spec expects " + shape_to_string(tensor.shape()));
    }
    in.need(tensor.size() * 4, "parameter values");
    auto values = tensor.mutable_values();
    for (auto& v : values) v = static_cast<T>(std::bit_cast<float>(in.u32()));
  }
  if (!in.done()) fail(ErrorKind::codec, "trailing bytes after checkpoint at offset " + std::to_string(in.offset()));
  return model;
}

template <class T>
void save_checkpoint(const std::string& path, const Model<T>& model) {
  write_binary_file(path, encode_checkpoint(model));
}

template <class T>
Model<T> load_checkpoint(const std::string& path) {
  const auto bytes = read_binary_file(path);
  try {
    return decode_checkpoint<T>(bytes);
  } catch (const Error& e) {
    fail(e.kind(), "'" + path + "': " + e.detail());
  }
}

template std::vector<std::uint8_t> encode_checkpoint(const Model<float>&);
template std::vector<std::uint8_t> encode_checkpoint(const Model<double>&);
template Model<float> decode_checkpoint<float>(std::span<const std::uint8_t>);
template Model<double> decode_checkpoint<double>(std::span<const std::uint8_t>);
template void save_checkpoint(const std::string&, const Model<float>&);
template void save_checkpoint(const std::string&, const Model<double>&);
template Model<float> load_checkpoint<float>(const std::string&);
template Model<double> load_checkpoint<double>(const std::string&);

}  // namespace mgf
