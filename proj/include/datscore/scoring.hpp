#pragma once

#include <Eigen/Core>
#include <string_view>

#include "datscore/backend.hpp"

namespace datscore {

enum class TermScheme { Uniform, Entropy };

std::string_view to_string(TermScheme scheme);
TermScheme parse_term_scheme(std::string_view name);

// Per-token weights for one trace. Normalized weights sum to 1, which makes a
// direction score a weighted mean log-probability. With raw = true the weights
// are 1 (Uniform) or the raw step entropies (Entropy) and the score is a sum.
struct TermWeights {
  Eigen::VectorXd weights;
  TermScheme scheme;
  bool normalized = true;
};

// Entropy scheme falls back to Uniform when every step entropy is 0.
TermWeights term_weights(const TokenTrace& trace, TermScheme scheme, bool raw = false);

// sum_t w_t * logprobs[t]. Throws Error(Contract) on a length mismatch.
double direction_score(const TokenTrace& trace, const TermWeights& weights);

inline double direction_score(const TokenTrace& trace, TermScheme scheme, bool raw = false) {
  return direction_score(trace, term_weights(trace, scheme, raw));
}

}  // namespace datscore
