#pragma once

#include <cstdint>
#include <random>

namespace mgf {

using Rng = std::mt19937_64;

// Mixes a base seed with stream indices so that independent consumers
// (folds, repeats, utterances) never share a generator state.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

inline Rng make_rng(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(base, a, b));
}

}  // namespace mgf
