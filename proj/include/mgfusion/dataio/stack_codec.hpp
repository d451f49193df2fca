#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgfusion/granularity/layered_embedding.hpp"

namespace mgf {

// Binary stack file: "MGEF", u16 version, u8 modality, u8 granularity,
// u32 L, u32 K, u32 D, then L*K*D little-endian float32 values.
inline constexpr std::size_t kStackHeaderBytes = 20;
inline constexpr std::uint16_t kStackFormatVersion = 1;

std::vector<std::uint8_t> encode_stack(const LayeredEmbedding& stack);
LayeredEmbedding decode_stack(std::span<const std::uint8_t> bytes);

void write_stack_file(const std::string& path, const LayeredEmbedding& stack);
LayeredEmbedding read_stack_file(const std::string& path);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mgf
