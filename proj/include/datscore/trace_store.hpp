#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "datscore/backend.hpp"

namespace datscore {

// Precomputed traces keyed by (example id, direction), read from JSON Lines:
//   {"example_id":str,"from":str,"to":str,"tokens":[str],"logprobs":[num],"entropies":[num]}
class TraceStore {
 public:
  static TraceStore parse(std::istream& in, std::string_view source_name,
                          std::optional<std::size_t> vocab_size = std::nullopt);
  static TraceStore load(const std::filesystem::path& path,
                         std::optional<std::size_t> vocab_size = std::nullopt);

  // Throws Error(Validation) on a duplicate key or a broken trace.
  void insert(TraceKey key, TokenTrace trace);

  const TokenTrace* find(const TraceKey& key) const;
  std::size_t size() const { return traces_.size(); }

  // Records in key order.
  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::map<TraceKey, TokenTrace> traces_;
};

std::string serialize_trace_record(const TraceKey& key, const TokenTrace& trace);

// Serves forced-score requests from a TraceStore; cannot translate.
class TraceBackend final : public ProbBackend {
 public:
  TraceBackend(TraceStore store, std::string identity);

  static TraceBackend from_file(const std::filesystem::path& path,
                                std::optional<std::size_t> vocab_size = std::nullopt);

  TokenTrace forced_score(const ScoreRequest& request) const override;
  std::string translate(const std::string& text, const LanguageCode& src_lang,
                        const LanguageCode& tgt_lang) const override;
  bool can_translate() const override { return false; }
  std::string identity() const override { return identity_; }

  const TraceStore& store() const { return store_; }

 private:
  TraceStore store_;
  std::string identity_;
};

}  // namespace datscore
