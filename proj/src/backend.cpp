#include "datscore/backend.hpp"

#include <cmath>

#include "datscore/errors.hpp"
#include "datscore/http_backend.hpp"
#include "datscore/toy_backend.hpp"
#include "datscore/trace_store.hpp"

namespace datscore {

void validate_trace(const TokenTrace& trace, std::optional<std::size_t> vocab_size) {
  const auto m = trace.logprobs.size();
  if (m == 0) throw Error(ErrorCode::Validation, "trace is empty");
  if (static_cast<Eigen::Index>(trace.tokens.size()) != m || trace.entropies.size() != m) {
    throw Error(ErrorCode::Validation,
                "trace array lengths differ (tokens " + std::to_string(trace.tokens.size()) +
                    ", logprobs " + std::to_string(m) + ", entropies " +
                    std::to_string(trace.entropies.size()) + ")");
  }
  // Entropies computed in floating point can overshoot ln v by a few ulps.
  const double max_entropy =
      vocab_size ? std::log(static_cast<double>(*vocab_size)) + 1e-9 : HUGE_VAL;
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto step = std::to_string(t);
    const double lp = trace.logprobs(t);
    const double h = trace.entropies(t);
    if (!std::isfinite(lp)) throw Error(ErrorCode::Validation, "non-finite logprob at step " + step);
    if (lp > 0.0) throw Error(ErrorCode::Validation, "logprob > 0 at step " + step);
    if (!std::isfinite(h)) throw Error(ErrorCode::Validation, "non-finite entropy at step " + step);
    if (h < 0.0) throw Error(ErrorCode::Validation, "entropy < 0 at step " + step);
    if (h > max_entropy) throw Error(ErrorCode::Validation, "entropy > ln v at step " + step);
  }
}

std::unique_ptr<ProbBackend> make_backend(std::string_view spec, const BackendOptions& options) {
  if (spec == "toy") return std::make_unique<ToyBackend>();
  if (spec.starts_with("trace:")) {
    return std::make_unique<TraceBackend>(
        TraceBackend::from_file(std::string(spec.substr(6)), options.vocab_size));
  }
  if (spec.starts_with("http://") || spec.starts_with("https://")) {
    return std::make_unique<HttpBackend>(std::string(spec), HttpOptions{.batch_size = options.batch_size,
                                                                       .vocab_size = options.vocab_size});
  }
  if (spec.starts_with("http:")) {
    // "http:<url>" with a full URL, or "http:host:port".
    const auto rest = spec.substr(5);
    const bool has_scheme = rest.starts_with("http://") || rest.starts_with("https://");
    return make_backend((has_scheme ? "" : "http://") + std::string(rest), options);
  }
  throw Error(ErrorCode::Validation,
              "unknown backend '" + std::string(spec) + "' (expected toy, trace:<path> or http:<url>)");
}

}  // namespace datscore
