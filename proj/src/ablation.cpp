#include "datscore/ablation.hpp"

#include <iomanip>
#include <sstream>

#include "datscore/errors.hpp"
#include "datscore/parallel.hpp"
#include "json.hpp"

namespace datscore {
namespace {

std::string join_directions(const std::vector<Direction>& dirs) {
  std::string out;
  for (const auto& d : dirs) {
    if (!out.empty()) out += ',';
    out += d.name();
  }
  return out;
}

std::string format_value(const AblationCell& cell) {
  if (!cell.result) return "NA";
  std::ostringstream out;
  out << std::setprecision(17) << cell.result->value;
  return out.str();
}

}  // namespace

const AblationCell* AblationReport::find(std::string_view section, std::string_view label) const {
  for (const auto& c : cells) {
    if (c.section == section && c.label == label) return &c;
  }
  return nullptr;
}

AblationReport ablation_report(std::span<const EvalExample> examples, const TraceTable& traces,
                               const AblationConfig& config) {
  const auto& base = config.directions;
  AblationReport report;
  const auto add = [&](std::string section, std::string label, const DirectionSet& set,
                       TermScheme term, Averaging averaging) {
    report.cells.push_back({std::move(section), std::move(label), set.directions(), term, averaging,
                            config.raw_sum, std::nullopt, ""});
  };

  add("full", "all", base, config.term, config.averaging);
  for (const auto& d : base.directions()) add("single", d.name(), base.only(d), config.term, config.averaging);
  if (base.size() > 1) {
    for (const auto& d : base.directions()) {
      add("leave-one-out", "-" + d.name(), base.without(d), config.term, config.averaging);
    }
  }
  for (auto term : {TermScheme::Entropy, TermScheme::Uniform}) {
    for (auto avg : {Averaging::OneVsRest, Averaging::Uniform}) {
      add("grid", std::string(to_string(term)) + "/" + std::string(to_string(avg)), base, term, avg);
    }
  }

  // Both term schemes share the cached traces; only the arithmetic differs.
  const ScoreMatrix entropy_matrix = score_traces(traces, TermScheme::Entropy, config.raw_sum);
  const ScoreMatrix uniform_matrix = score_traces(traces, TermScheme::Uniform, config.raw_sum);

  parallel_for(report.cells.size(), config.workers, [&](std::size_t i) {
    auto& cell = report.cells[i];
    try {
      const auto& source = cell.term == TermScheme::Entropy ? entropy_matrix : uniform_matrix;
      const auto matrix = source.select(DirectionSet::subset(base.mode(), cell.directions));
      const auto weights = direction_weights(matrix, cell.averaging);
      const Eigen::VectorXd scores = datscore(matrix, weights);
      std::map<std::string, double> by_id;
      for (std::size_t r = 0; r < matrix.row_ids.size(); ++r) {
        by_id.emplace(matrix.row_ids[r], scores(static_cast<Eigen::Index>(r)));
      }
      cell.result = correlate_with_humans(examples, by_id, config.ties);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData && e.code() != ErrorCode::ZeroVariance) throw;
      cell.error = e.what();
    }
  });
  return report;
}

AblationReport ablation_report(std::span<const EvalExample> examples, const ProbBackend& backend,
                               const AblationConfig& config, const PipelineOptions& options) {
  return ablation_report(examples, collect_traces(examples, config.directions, backend, options), config);
}

std::string AblationReport::to_tsv() const {
  std::ostringstream out;
  out << "section\tlabel\tdirections\tterm_weighting\taveraging\traw_sum\tkind\tvalue\tn_used\n";
  for (const auto& c : cells) {
    out << c.section << '\t' << c.label << '\t' << join_directions(c.directions) << '\t'
        << to_string(c.term) << '\t' << to_string(c.averaging) << '\t' << (c.raw_sum ? "true" : "false")
        << '\t' << (c.result ? std::string(to_string(c.result->kind)) : "NA") << '\t' << format_value(c)
        << '\t' << (c.result ? std::to_string(c.result->n_used) : "NA") << '\n';
  }
  return out.str();
}

std::string AblationReport::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json obj;
    obj["section"] = c.section;
    obj["label"] = c.label;
    auto dirs = nlohmann::ordered_json::array();
    for (const auto& d : c.directions) dirs.push_back(d.name());
    obj["directions"] = std::move(dirs);
    obj["term_weighting"] = std::string(to_string(c.term));
    obj["averaging"] = std::string(to_string(c.averaging));
    obj["raw_sum"] = c.raw_sum;
    if (c.result) {
      obj["kind"] = std::string(to_string(c.result->kind));
      obj["value"] = c.result->value;
      obj["n_used"] = c.result->n_used;
      obj["n_ties"] = c.result->n_ties;
      obj["tie_policy"] = std::string(to_string(c.result->tie_policy));
    } else {
      obj["error"] = c.error;
    }
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::string AblationReport::to_text() const {
  std::ostringstream out;
  out << std::left << std::setw(15) << "section" << std::setw(30) << "label" << std::setw(18) << "kind"
      << std::right << std::setw(10) << "value" << '\n';
  for (const auto& c : cells) {
    out << std::left << std::setw(15) << c.section << std::setw(30) << c.label << std::setw(18)
        << (c.result ? std::string(to_string(c.result->kind)) : "NA") << std::right << std::setw(10);
    if (c.result) {
      out << std::fixed << std::setprecision(4) << c.result->value;
    } else {
      out << "NA";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace datscore
