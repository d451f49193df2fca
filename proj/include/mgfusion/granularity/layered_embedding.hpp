#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mgf {

enum class Modality : std::uint8_t { speech = 0, text = 1 };
enum class Granularity : std::uint8_t { frame = 0, phone = 1, syllable = 2, word = 3, wordpiece = 4 };

const char* to_string(Modality m);
const char* to_string(Granularity g);

// L x K x D stack of per-layer encoder outputs for one utterance and one
// modality, stored layer-major, position-next, dim-last.
struct LayeredEmbedding {
  Modality modality = Modality::speech;
  Granularity granularity = Granularity::frame;
  std::size_t layers = 0;
  std::size_t positions = 0;
  std::size_t dim = 0;
  std::vector<float> data;

  LayeredEmbedding() = default;
  LayeredEmbedding(Modality m, Granularity g, std::size_t l, std::size_t k, std::size_t d);

  float& at(std::size_t l, std::size_t k, std::size_t d) { return data[(l * positions + k) * dim + d]; }
  float at(std::size_t l, std::size_t k, std::size_t d) const { return data[(l * positions + k) * dim + d]; }

  std::span<const float> row(std::size_t l, std::size_t k) const {
    return std::span<const float>(data).subspan((l * positions + k) * dim, dim);
  }
  std::span<float> row(std::size_t l, std::size_t k) {
    return std::span<float>(data).subspan((l * positions + k) * dim, dim);
  }

  // Throws a validation error when extents are zero, data length disagrees
  // with L*K*D, or any value is non-finite.
  void validate() const;

  // Copy with `extra` zero-filled positions appended to every layer.
  LayeredEmbedding padded(std::size_t extra) const;

  bool operator==(const LayeredEmbedding&) const = default;
};

}  // namespace mgf
