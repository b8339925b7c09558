#include "datscore/scoring.hpp"

#include "datscore/errors.hpp"

namespace datscore {

std::string_view to_string(TermScheme scheme) {
  return scheme == TermScheme::Entropy ? "entropy" : "uniform";
}

TermScheme parse_term_scheme(std::string_view name) {
  if (name == "entropy") return TermScheme::Entropy;
  if (name == "uniform") return TermScheme::Uniform;
  throw Error(ErrorCode::Validation, "unknown term weighting '" + std::string(name) + "'");
}

TermWeights term_weights(const TokenTrace& trace, TermScheme scheme, bool raw) {
  const Eigen::Index m = trace.size();
  if (m == 0) throw Error(ErrorCode::Contract, "term weights of an empty trace");

  const auto uniform = [&] {
    return TermWeights{raw ? Eigen::VectorXd::Ones(m) : Eigen::VectorXd::Constant(m, 1.0 / m),
                       TermScheme::Uniform, !raw};
  };
  if (scheme == TermScheme::Uniform) return uniform();

  const double total = trace.entropies.sum();
  if (!(total > 0.0)) return uniform();
  return TermWeights{raw ? trace.entropies : Eigen::VectorXd(trace.entropies / total),
                     TermScheme::Entropy, !raw};
}

double direction_score(const TokenTrace& trace, const TermWeights& weights) {
  if (weights.weights.size() != trace.size()) {
    throw Error(ErrorCode::Contract, "term weights length " + std::to_string(weights.weights.size()) +
                                         " != trace length " + std::to_string(trace.size()));
  }
  return weights.weights.dot(trace.logprobs);
}

}  // namespace datscore
