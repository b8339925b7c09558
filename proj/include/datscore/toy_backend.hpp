#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "datscore/backend.hpp"

namespace datscore {

// Small multi-parallel corpus: each entry maps a language code to the
// sentence in that language.
struct ToyCorpus {
  std::vector<std::map<std::string, std::string>> entries;
};

// The built-in 8-entry en/fr/es corpus.
const ToyCorpus& fixture_corpus();

// Lowercase ASCII, split on whitespace.
std::vector<std::string> toy_tokenize(std::string_view text);

inline constexpr const char* kUnknownToken = "<unk>";

// Interpolated bag-of-words lexical model over a ToyCorpus.
//
//   c(x, z)   = sum over corpus entries of count(x in input side) * count(z in output side)
//   T(z | x)  = (c(x, z) + 1) / (sum_z' c(x, z') + |V_out|)
//   P(z | X)  = lambda * mean_{x in X} T(z | x) + (1 - lambda) / |V_out|
//
// V_out is the output language's corpus vocabulary plus "<unk>"; unseen tokens
// on either side map to "<unk>". P does not depend on the target prefix, so
// every step of a forced decode shares one distribution.
class ToyBackend final : public ProbBackend {
 public:
  explicit ToyBackend(ToyCorpus corpus = fixture_corpus(), double lambda = 0.5);

  TokenTrace forced_score(const ScoreRequest& request) const override;
  std::string translate(const std::string& text, const LanguageCode& src_lang,
                        const LanguageCode& tgt_lang) const override;
  std::string identity() const override;

  bool supports(const LanguageCode& lang) const;

  // Inspection hooks.
  const std::vector<std::string>& vocabulary(const LanguageCode& lang) const;
  const Eigen::MatrixXd& lexical_table(const LanguageCode& in, const LanguageCode& out) const;
  Eigen::VectorXd step_distribution(std::string_view input_text, const LanguageCode& in,
                                    const LanguageCode& out) const;

 private:
  struct Vocab {
    std::vector<std::string> tokens;  // sorted; includes <unk>
    std::unordered_map<std::string, Eigen::Index> index;

    Eigen::Index lookup(const std::string& token) const;
  };

  const Vocab& vocab(const LanguageCode& lang) const;

  double lambda_;
  std::string corpus_hash_;
  std::map<std::string, Vocab> vocabs_;
  std::map<std::pair<std::string, std::string>, Eigen::MatrixXd> tables_;
};

}  // namespace datscore
