#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "datscore/meta_eval.hpp"
#include "datscore/pipeline.hpp"

namespace datscore {

struct AblationConfig {
  DirectionSet directions = DirectionSet::full(DirectionMode::MT8);
  TermScheme term = TermScheme::Entropy;
  Averaging averaging = Averaging::OneVsRest;
  bool raw_sum = false;
  TiePolicy ties = TiePolicy::Discordant;
  std::size_t workers = 0;
};

// One configuration and its correlation with the human judgments. A cell whose
// statistic is undefined (constant scores, too few rows) carries the error.
struct AblationCell {
  std::string section;  // full | single | leave-one-out | grid
  std::string label;
  std::vector<Direction> directions;
  TermScheme term;
  Averaging averaging;
  bool raw_sum;
  std::optional<CorrelationResult> result;
  std::string error;
};

struct AblationReport {
  std::vector<AblationCell> cells;

  const AblationCell* find(std::string_view section, std::string_view label) const;

  std::string to_tsv() const;
  std::string to_json() const;
  std::string to_text() const;
};

// Rows: the base configuration ("full"), every direction alone ("single"),
// the set minus each direction ("leave-one-out"), and the entropy on/off x
// one-vs-rest on/off grid. All cells reuse the given traces.
AblationReport ablation_report(std::span<const EvalExample> examples, const TraceTable& traces,
                               const AblationConfig& config);

AblationReport ablation_report(std::span<const EvalExample> examples, const ProbBackend& backend,
                               const AblationConfig& config, const PipelineOptions& options = {});

}  // namespace datscore
