#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "datscore/directions.hpp"
#include "datscore/trace_store.hpp"
#include "datscore/types.hpp"

namespace datscore {

struct SynthOptions {
  std::size_t n = 100;
  double noise = 0.0;
  // Coefficient of the hidden quality in every direction column; 0 gives pure noise.
  double signal = 1.0;
  std::optional<Direction> outlier;
  std::uint64_t seed = 42;
  DirectionMode mode = DirectionMode::MT8;
};

struct SynthData {
  std::vector<EvalExample> examples;
  TraceStore traces;
};

// n relative-ranking examples (de -> en, augmentations pre-filled) and a trace
// for every (segment, direction). Each hypothesis gets a hidden quality
// q ~ U[0,1); the better one of a pair has the larger q. Direction columns are
//   signal * q + noise * N(0,1)         (regular)
//  -signal * q + noise * N(0,1)         (outlier)
// all shifted by one common constant so every value is <= -0.5. Each trace has
// two tokens with logprobs [v, v], so its weighted mean is exactly v.
SynthData synth_generate(const SynthOptions& options);

}  // namespace datscore
