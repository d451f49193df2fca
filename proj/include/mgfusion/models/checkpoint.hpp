#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgfusion/models/model.hpp"

namespace mgf {

// Checkpoint container: "MGCK", u32 version, u32 spec length, spec text
// (key = value lines), u32 parameter count, then per parameter: u32 name
// length, name, u32 rank, u32 extents[rank], little-endian float32 values
// in row-major order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
std::vector<std::uint8_t> encode_checkpoint(const Model<T>& model);

// Rebuilds the model from the embedded spec and loads the parameters.
// Missing, extra or reshaped parameters are rejected.
template <class T>
Model<T> decode_checkpoint(std::span<const std::uint8_t> bytes);

template <class T>
void save_checkpoint(const std::string& path, const Model<T>& model);

template <class T>
Model<T> load_checkpoint(const std::string& path);

}  // namespace mgf
