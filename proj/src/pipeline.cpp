#include "datscore/pipeline.hpp"

#include <istream>
#include <ostream>
#include <set>

#include "datscore/errors.hpp"
#include "datscore/parallel.hpp"
#include "json.hpp"

namespace datscore {

std::pair<LanguageCode, LanguageCode> AugmentPolicy::resolve(const EvalExample& ex) const {
  const LanguageCode en("en");
  const LanguageCode es("es");
  std::pair<LanguageCode, LanguageCode> langs{en, en};
  if (ex.hyp.lang == en) {
    langs = {en, es};
  } else if (ex.src.lang == en) {
    langs = {es, en};
  }
  if (trans1_lang) langs.first = *trans1_lang;
  if (trans2_lang) langs.second = *trans2_lang;
  return langs;
}

AugmentTargets augment_targets(const DirectionSet& directions) {
  return {directions.uses(EntityKind::Trans1), directions.uses(EntityKind::Trans2)};
}

EvalExample augment(const EvalExample& example, const AugmentPolicy& policy,
                    const ProbBackend& backend, AugmentTargets targets) {
  EvalExample out = example;
  const bool want1 = targets.trans1 && !out.trans1;
  const bool want2 = targets.trans2 && !out.trans2;
  if (!want1 && !want2) return out;
  const auto [lang1, lang2] = policy.resolve(example);
  try {
    if (want1) {
      out.trans1 = Entity{EntityKind::Trans1,
                          trim(backend.translate(example.src.text, example.src.lang, lang1)), lang1};
    }
    if (want2) {
      out.trans2 = Entity{EntityKind::Trans2,
                          trim(backend.translate(example.ref.text, example.ref.lang, lang2)), lang2};
    }
  } catch (const Error& e) {
    throw Error(e.code(), "augmenting example '" + example.id + "': " + e.what());
  }
  return out;
}

std::vector<EvalExample> augment_dataset(std::span<const EvalExample> examples,
                                         const AugmentPolicy& policy, const ProbBackend& backend,
                                         AugmentTargets targets, std::size_t workers) {
  std::vector<EvalExample> out(examples.begin(), examples.end());
  parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = augment(examples[i], policy, backend, targets); });
  return out;
}

bool needs_augmentation(std::span<const EvalExample> examples, AugmentTargets targets) {
  for (const auto& ex : examples) {
    if ((targets.trans1 && !ex.trans1) || (targets.trans2 && !ex.trans2)) return true;
  }
  return false;
}

TraceTable collect_traces(std::span<const EvalExample> examples, const DirectionSet& directions,
                          const ProbBackend& backend, const PipelineOptions& options) {
  const auto segments = expand_segments(examples);
  const std::size_t k = directions.size();

  for (const auto& ex : examples) {
    for (const auto& d : directions.directions()) {
      for (auto kind : {d.from, d.to}) {
        if (!ex.entity(kind)) {
          throw Error(ErrorCode::Validation, "example '" + ex.id + "' lacks " +
                                                 std::string(to_string(kind)) + " needed by " + d.name());
        }
      }
    }
  }

  std::vector<TokenTrace> cells(segments.size() * k);
  std::vector<std::optional<std::string>> failures(cells.size());
  parallel_for(cells.size(), options.workers, [&](std::size_t cell) {
    const auto& seg = segments[cell / k];
    const auto& d = directions[cell % k];
    const auto& ex = examples[seg.example_index];
    const auto& from = d.from == EntityKind::Hypo ? seg.hyp : *ex.entity(d.from);
    const auto& to = d.to == EntityKind::Hypo ? seg.hyp : *ex.entity(d.to);
    try {
      cells[cell] = backend.forced_score(
          {from.text, from.lang, to.text, to.lang, TraceKey{seg.id, d}});
    } catch (const Error& e) {
      if (!is_backend_error(e.code())) throw;
      failures[cell] = seg.id + " " + d.name() + ": " + e.what();
    }
  });

  TraceTable table;
  table.directions = directions;
  std::set<std::size_t> dropped;
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    const auto idx = segments[cell / k].example_index;
    if (failures[cell] && dropped.insert(idx).second) {
      table.exclusions.push_back({examples[idx].id, *failures[cell]});
    }
  }
  if (!examples.empty() && static_cast<double>(dropped.size()) >
                               options.max_exclusion_fraction * static_cast<double>(examples.size())) {
    std::string what = std::to_string(dropped.size()) + " of " + std::to_string(examples.size()) +
                       " examples failed to score; first: " + table.exclusions.front().reason;
    throw Error(ErrorCode::ExclusionLimit, what);
  }
  for (std::size_t row = 0; row < segments.size(); ++row) {
    if (dropped.contains(segments[row].example_index)) continue;
    table.segments.push_back(segments[row]);
    for (std::size_t c = 0; c < k; ++c) table.cells.push_back(std::move(cells[row * k + c]));
  }
  return table;
}

ScoreMatrix ScoreMatrix::select(const DirectionSet& subset) const {
  ScoreMatrix out{row_ids, subset, Eigen::MatrixXd(values.rows(), static_cast<Eigen::Index>(subset.size())),
                  exclusions};
  for (std::size_t c = 0; c < subset.size(); ++c) {
    const auto src = directions.index_of(subset[c]);
    if (!src) throw Error(ErrorCode::Contract, "matrix has no column " + subset[c].name());
    out.values.col(static_cast<Eigen::Index>(c)) = values.col(static_cast<Eigen::Index>(*src));
  }
  return out;
}

ScoreMatrix score_traces(const TraceTable& traces, TermScheme scheme, bool raw_sum) {
  const std::size_t rows = traces.segments.size();
  const std::size_t k = traces.directions.size();
  ScoreMatrix m{{}, traces.directions,
                Eigen::MatrixXd(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k)),
                traces.exclusions};
  m.row_ids.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    m.row_ids.push_back(traces.segments[r].id);
    for (std::size_t c = 0; c < k; ++c) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          direction_score(traces.at(r, c), scheme, raw_sum);
    }
  }
  return m;
}

ScoreMatrix score_matrix(std::span<const EvalExample> examples, const DirectionSet& directions,
                         const ProbBackend& backend, TermScheme scheme, bool raw_sum,
                         const PipelineOptions& options) {
  return score_traces(collect_traces(examples, directions, backend, options), scheme, raw_sum);
}

std::string_view to_string(Averaging averaging) {
  return averaging == Averaging::OneVsRest ? "one-vs-rest" : "uniform";
}

Averaging parse_averaging(std::string_view name) {
  if (name == "one-vs-rest") return Averaging::OneVsRest;
  if (name == "uniform") return Averaging::Uniform;
  throw Error(ErrorCode::Validation, "unknown averaging '" + std::string(name) + "'");
}

std::string_view to_string(DirectionWeights::Provenance provenance) {
  return provenance == DirectionWeights::Provenance::OneVsRest ? "one-vs-rest" : "uniform";
}

double DirectionWeights::at(const Direction& d) const {
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i] == d) return values(static_cast<Eigen::Index>(i));
  }
  throw Error(ErrorCode::Contract, "no weight for direction " + d.name());
}

DirectionWeights uniform_weights(const DirectionSet& directions) {
  const auto k = static_cast<Eigen::Index>(directions.size());
  return {directions.directions(), Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)),
          DirectionWeights::Provenance::UniformAvg};
}

DirectionWeights one_vs_rest_weights(const ScoreMatrix& matrix) {
  if (matrix.values.rows() < 3) {
    throw Error(ErrorCode::InsufficientData,
                "one-vs-rest weights need at least 3 scored rows, got " + std::to_string(matrix.values.rows()));
  }
  if (matrix.directions.size() < 2) return uniform_weights(matrix.directions);

  const Eigen::VectorXd clamped = one_vs_rest_raw(matrix.values).cwiseMax(0.0);
  const double total = clamped.sum();
  if (!(total > 0.0)) return uniform_weights(matrix.directions);
  return {matrix.directions.directions(), clamped / total, DirectionWeights::Provenance::OneVsRest};
}

DirectionWeights direction_weights(const ScoreMatrix& matrix, Averaging averaging) {
  return averaging == Averaging::OneVsRest ? one_vs_rest_weights(matrix)
                                           : uniform_weights(matrix.directions);
}

Eigen::VectorXd datscore(const ScoreMatrix& matrix, const DirectionWeights& weights) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(matrix.directions.size()));
  for (std::size_t c = 0; c < matrix.directions.size(); ++c) {
    w(static_cast<Eigen::Index>(c)) = weights.at(matrix.directions[c]);
  }
  return matrix.values * w;
}

void write_scores(std::ostream& out, const ScoreMatrix& matrix, const Eigen::VectorXd& scores) {
  for (std::size_t r = 0; r < matrix.row_ids.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    nlohmann::ordered_json obj;
    obj["id"] = matrix.row_ids[r];
    obj["datscore"] = scores(row);
    auto& per = obj["per_direction"];
    per = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < matrix.directions.size(); ++c) {
      per[matrix.directions[c].name()] = matrix.values(row, static_cast<Eigen::Index>(c));
    }
    out << obj.dump() << '\n';
  }
}

std::vector<std::pair<std::string, double>> read_scores(std::istream& in, std::string_view source_name) {
  std::vector<std::pair<std::string, double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      out.emplace_back(obj.at("id").get<std::string>(), obj.at("datscore").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string(source_name), line_no, std::string("malformed score record: ") + e.what());
    }
  }
  return out;
}

}  // namespace datscore
