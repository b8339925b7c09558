#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "datscore/backend.hpp"

namespace datscore {

struct HttpOptions {
  std::size_t batch_size = 16;
  int attempts = 3;
  std::chrono::milliseconds backoff{250};  // doubled after each failed attempt
  std::chrono::milliseconds timeout{60000};
  std::optional<std::size_t> vocab_size;
};

// Client for the inference bridge:
//   POST /v1/score      {"input_text","input_lang","output_text","output_lang"}
//                       -> {"tokens":[...],"logprobs":[...],"entropies":[...]}
//   POST /v1/translate  {"text","src_lang","tgt_lang"} -> {"translation":str}
// Concurrent calls are coalesced into array-bodied batch requests of up to
// batch_size items. Transport, 5xx and malformed responses are retried, then
// surface as BackendUnavailable.
class HttpBackend final : public ProbBackend {
 public:
  explicit HttpBackend(std::string base_url, HttpOptions options = {});
  ~HttpBackend() override;

  HttpBackend(const HttpBackend&) = delete;
  HttpBackend& operator=(const HttpBackend&) = delete;

  TokenTrace forced_score(const ScoreRequest& request) const override;
  std::string translate(const std::string& text, const LanguageCode& src_lang,
                        const LanguageCode& tgt_lang) const override;
  std::string identity() const override { return "http:" + base_url_; }

 private:
  class Batcher;

  std::string base_url_;
  HttpOptions options_;
  std::unique_ptr<Batcher> score_batcher_;
  std::unique_ptr<Batcher> translate_batcher_;
};

}  // namespace datscore
