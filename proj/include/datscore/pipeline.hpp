#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "datscore/backend.hpp"
#include "datscore/directions.hpp"
#include "datscore/scoring.hpp"
#include "datscore/stats.hpp"
#include "datscore/types.hpp"

namespace datscore {

// Languages for the two augmented translations. Unset fields use the default:
//   hyp in English        -> (en, es)
//   source in English     -> (es, en)
//   otherwise             -> (en, en)
struct AugmentPolicy {
  std::optional<LanguageCode> trans1_lang;
  std::optional<LanguageCode> trans2_lang;

  std::pair<LanguageCode, LanguageCode> resolve(const EvalExample& example) const;
};

struct AugmentTargets {
  bool trans1 = true;
  bool trans2 = true;
};

AugmentTargets augment_targets(const DirectionSet& directions);

// Fills missing trans1 (translation of src) and trans2 (translation of ref).
// Present fields are kept as is and cost no backend call. Backend errors are
// rethrown with the example id prefixed.
EvalExample augment(const EvalExample& example, const AugmentPolicy& policy,
                    const ProbBackend& backend, AugmentTargets targets = {});

std::vector<EvalExample> augment_dataset(std::span<const EvalExample> examples,
                                         const AugmentPolicy& policy, const ProbBackend& backend,
                                         AugmentTargets targets = {}, std::size_t workers = 0);

bool needs_augmentation(std::span<const EvalExample> examples, AugmentTargets targets);

struct Exclusion {
  std::string example_id;
  std::string reason;
};

struct PipelineOptions {
  std::size_t workers = 0;  // 0 = hardware concurrency
  double max_exclusion_fraction = 0.10;
};

// Forced-decoding traces for every (segment, direction) of the examples that
// scored cleanly. An example whose backend calls fail is dropped as a whole.
struct TraceTable {
  std::vector<Segment> segments;
  DirectionSet directions = DirectionSet::full(DirectionMode::MT8);
  std::vector<TokenTrace> cells;  // row-major: segments x directions
  std::vector<Exclusion> exclusions;

  const TokenTrace& at(std::size_t row, std::size_t col) const {
    return cells[row * directions.size() + col];
  }
};

// Pass 1. Runs backend calls in parallel; throws Error(ExclusionLimit) when more
// than max_exclusion_fraction of the examples fail.
TraceTable collect_traces(std::span<const EvalExample> examples, const DirectionSet& directions,
                          const ProbBackend& backend, const PipelineOptions& options = {});

struct ScoreMatrix {
  std::vector<std::string> row_ids;
  DirectionSet directions = DirectionSet::full(DirectionMode::MT8);
  Eigen::MatrixXd values;  // rows x directions
  std::vector<Exclusion> exclusions;

  // Column subset in the order of `subset`.
  ScoreMatrix select(const DirectionSet& subset) const;
};

ScoreMatrix score_traces(const TraceTable& traces, TermScheme scheme, bool raw_sum = false);

ScoreMatrix score_matrix(std::span<const EvalExample> examples, const DirectionSet& directions,
                         const ProbBackend& backend, TermScheme scheme, bool raw_sum = false,
                         const PipelineOptions& options = {});

enum class Averaging { OneVsRest, Uniform };

std::string_view to_string(Averaging averaging);
Averaging parse_averaging(std::string_view name);

struct DirectionWeights {
  enum class Provenance { OneVsRest, UniformAvg };

  std::vector<Direction> directions;
  Eigen::VectorXd values;
  Provenance provenance;

  // Throws Error(Contract) for a direction without a weight.
  double at(const Direction& d) const;
};

std::string_view to_string(DirectionWeights::Provenance provenance);

// Raw one-vs-rest weights: for each column, the sum of its Pearson correlations
// with every other column. Zero-variance columns correlate 0 with everything.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> one_vs_rest_raw(
    const Eigen::MatrixBase<Derived>& columns) {
  using Scalar = typename Derived::Scalar;
  const auto corr = stats::column_correlations(columns);
  const Eigen::Index k = corr.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> raw = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      if (b != a) raw(a) += corr(a, b);
    }
  }
  return raw;
}

// Clamps raw weights at 0 and normalizes; uniform when everything clamps to 0.
// Needs at least 3 rows (Error(InsufficientData) otherwise).
DirectionWeights one_vs_rest_weights(const ScoreMatrix& matrix);
DirectionWeights uniform_weights(const DirectionSet& directions);
DirectionWeights direction_weights(const ScoreMatrix& matrix, Averaging averaging);

// Weighted average of each row; aligned with matrix.row_ids.
Eigen::VectorXd datscore(const ScoreMatrix& matrix, const DirectionWeights& weights);

// {"id":str,"datscore":num,"per_direction":{"src->hypo":num,...}} per row.
void write_scores(std::ostream& out, const ScoreMatrix& matrix, const Eigen::VectorXd& scores);

// Reads the "id" and "datscore" fields of a scores file.
std::vector<std::pair<std::string, double>> read_scores(std::istream& in, std::string_view source_name);

}  // namespace datscore
