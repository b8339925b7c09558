#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datscore/types.hpp"

namespace datscore {

// How metric ties on a human-ranked pair are counted.
enum class TiePolicy { Discordant, Excluded };

std::string_view to_string(TiePolicy policy);
TiePolicy parse_tie_policy(std::string_view name);

enum class CorrelationKind { KendallTauLike, AbsPearson };

std::string_view to_string(CorrelationKind kind);

struct CorrelationResult {
  CorrelationKind kind;
  double value;
  std::size_t n_used;
  std::size_t n_ties = 0;
  TiePolicy tie_policy = TiePolicy::Discordant;
};

// tau = (C - D) / (C + D) over pairs (metric score of the human-preferred
// hypothesis, metric score of the dispreferred one).
CorrelationResult kendall_tau_like(const Eigen::Ref<const Eigen::VectorXd>& better,
                                   const Eigen::Ref<const Eigen::VectorXd>& worse,
                                   TiePolicy policy = TiePolicy::Discordant);

// |r| of the Pearson correlation. Needs >= 3 finite points and variance in
// both coordinates (InsufficientData / ZeroVariance otherwise).
CorrelationResult abs_pearson(const Eigen::Ref<const Eigen::VectorXd>& metric,
                              const Eigen::Ref<const Eigen::VectorXd>& human);

// Correlates segment-level metric scores with the examples' judgments:
// Kendall-like for relative ranking, |r| for direct assessment. Examples
// without a judgment or without scores are skipped; a mix of judgment kinds
// is a validation error.
CorrelationResult correlate_with_humans(std::span<const EvalExample> examples,
                                        const std::map<std::string, double>& segment_scores,
                                        TiePolicy policy = TiePolicy::Discordant);

struct MetaEvalRow {
  std::string lang_pair;  // "de-en", or "all"
  CorrelationResult result;
};

// One row per language pair (sorted) followed by "all".
std::vector<MetaEvalRow> meta_evaluate(std::span<const EvalExample> examples,
                                       const std::map<std::string, double>& segment_scores,
                                       TiePolicy policy = TiePolicy::Discordant);

std::string meta_eval_tsv(std::span<const MetaEvalRow> rows);
std::string meta_eval_json(std::span<const MetaEvalRow> rows);
std::string meta_eval_text(std::span<const MetaEvalRow> rows);

}  // namespace datscore
