#include "mgfusion/granularity/layered_embedding.hpp"

#include <cmath>

#include "mgfusion/common/error.hpp"

namespace mgf {

const char* to_string(Modality m) {
  switch (m) {
    case Modality::speech: return "speech";
    case Modality::text: return "text";
  }
  return "?";
}

const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::frame: return "frame";
    case Granularity::phone: return "phone";
    case Granularity::syllable: return "syllable";
    case Granularity::word: return "word";
    case Granularity::wordpiece: return "wordpiece";
  }
  return "?";
}

LayeredEmbedding::LayeredEmbedding(Modality m, Granularity g, std::size_t l, std::size_t k, std::size_t d)
    : modality(m), granularity(g), layers(l), positions(k), dim(d), data(l * k * d, 0.0f) {}

void LayeredEmbedding::validate() const {
  if (layers == 0 || positions == 0 || dim == 0) {
    fail(ErrorKind::validation, "embedding stack has a zero extent (L=" + std::to_string(layers) +
                                    ", K=" + std::to_string(positions) + ", D=" + std::to_string(dim) + ")");
  }
  if (data.size() != layers * positions * dim) {
    fail(ErrorKind::validation, "embedding stack holds " + std::to_string(data.size()) +
                                    " values, expected " + std::to_string(layers * positions * dim));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      fail(ErrorKind::validation, "non-finite embedding value at flat index " + std::to_string(i));
    }
  }
}

LayeredEmbedding LayeredEmbedding::padded(std::size_t extra) const {
  LayeredEmbedding out(modality, granularity, layers, positions + extra, dim);
  for (std::size_t l = 0; l < layers; ++l)
    for (std::size_t k = 0; k < positions; ++k) {
      auto src = row(l, k);
      std::copy(src.begin(), src.end(), out.row(l, k).begin());
    }
  return out;
}

}  // namespace mgf
