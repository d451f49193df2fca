#include "mgfusion/granularity/pooling.hpp"

#include "mgfusion/common/error.hpp"

namespace mgf {

LayeredEmbedding pool_segments(const LayeredEmbedding& frames, const std::vector<Segment>& segments,
                               Granularity granularity) {
  if (segments.empty()) fail(ErrorKind::validation, "cannot pool with an empty segmentation");
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Segment& s = segments[k];
    if (s.end <= s.start || s.end > frames.positions) {
      fail(ErrorKind::validation, "segment " + std::to_string(k) + " [" + std::to_string(s.start) + ", " +
                                      std::to_string(s.end) + ") is outside [0, " +
                                      std::to_string(frames.positions) + ")");
    }
  }

  LayeredEmbedding out(frames.modality, granularity, frames.layers, segments.size(), frames.dim);
  std::vector<double> acc(frames.dim);
  for (std::size_t l = 0; l < frames.layers; ++l) {
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const Segment& s = segments[k];
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t f = s.start; f < s.end; ++f) {
        auto row = frames.row(l, f);
        for (std::size_t d = 0; d < frames.dim; ++d) acc[d] += row[d];
      }
      const double inv = 1.0 / static_cast<double>(s.end - s.start);
      auto dst = out.row(l, k);
      for (std::size_t d = 0; d < frames.dim; ++d) dst[d] = static_cast<float>(acc[d] * inv);
    }
  }
  return out;
}

}  // namespace mgf
