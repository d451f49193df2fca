#pragma once

#include <vector>

#include "mgfusion/granularity/alignment.hpp"
#include "mgfusion/granularity/layered_embedding.hpp"

namespace mgf {

// Segment-level stack: position k of every layer is the mean of frames
// [s_k, e_k) with divisor e_k - s_k.
LayeredEmbedding pool_segments(const LayeredEmbedding& frames, const std::vector<Segment>& segments,
                               Granularity granularity);

}  // namespace mgf
