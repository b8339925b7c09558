#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "datscore/types.hpp"

namespace datscore {

// Per-step forced-decoding record for one output sequence y_1..y_m.
//   logprobs[t]  = ln P(y_t | X, y_<t)          (nats)
//   entropies[t] = entropy of the step distribution over the full vocabulary (nats)
struct TokenTrace {
  std::vector<std::string> tokens;
  Eigen::VectorXd logprobs;
  Eigen::VectorXd entropies;

  Eigen::Index size() const { return logprobs.size(); }
};

// Throws Error(Validation) naming the first broken invariant. When
// vocab_size is given, entropies are also bounded by ln(vocab_size).
void validate_trace(const TokenTrace& trace, std::optional<std::size_t> vocab_size = std::nullopt);

// Identifies a trace precomputed offline.
struct TraceKey {
  std::string example_id;
  Direction direction;

  friend auto operator<=>(const TraceKey&, const TraceKey&) = default;
};

struct ScoreRequest {
  std::string input_text;
  LanguageCode input_lang;
  std::string output_text;
  LanguageCode output_lang;
  // Only the trace-file backend needs this; model backends ignore it.
  std::optional<TraceKey> key;
};

// Source of forced-decoding probabilities and translations. Implementations
// must be safe for concurrent calls.
class ProbBackend {
 public:
  virtual ~ProbBackend() = default;

  virtual TokenTrace forced_score(const ScoreRequest& request) const = 0;
  virtual std::string translate(const std::string& text, const LanguageCode& src_lang,
                                const LanguageCode& tgt_lang) const = 0;

  virtual bool can_translate() const { return true; }

  // Stable description recorded in run manifests.
  virtual std::string identity() const = 0;
};

struct BackendOptions {
  std::size_t batch_size = 16;
  std::optional<std::size_t> vocab_size;
};

// "toy" | "trace:<path>" | "http://host:port" (also accepted as "http:<url>").
std::unique_ptr<ProbBackend> make_backend(std::string_view spec, const BackendOptions& options = {});

}  // namespace datscore
