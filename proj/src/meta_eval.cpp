#include "datscore/meta_eval.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "datscore/errors.hpp"
#include "datscore/stats.hpp"
#include "json.hpp"

namespace datscore {

std::string_view to_string(TiePolicy policy) {
  return policy == TiePolicy::Discordant ? "discordant" : "excluded";
}

TiePolicy parse_tie_policy(std::string_view name) {
  if (name == "discordant") return TiePolicy::Discordant;
  if (name == "excluded") return TiePolicy::Excluded;
  throw Error(ErrorCode::Validation, "unknown tie policy '" + std::string(name) + "'");
}

std::string_view to_string(CorrelationKind kind) {
  return kind == CorrelationKind::KendallTauLike ? "kendall-tau-like" : "abs-pearson";
}

CorrelationResult kendall_tau_like(const Eigen::Ref<const Eigen::VectorXd>& better,
                                   const Eigen::Ref<const Eigen::VectorXd>& worse, TiePolicy policy) {
  if (better.size() != worse.size()) {
    throw Error(ErrorCode::Contract, "kendall-tau-like: better/worse lengths differ");
  }
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::size_t ties = 0;
  for (Eigen::Index i = 0; i < better.size(); ++i) {
    if (better(i) > worse(i)) {
      ++concordant;
    } else if (better(i) < worse(i)) {
      ++discordant;
    } else {
      ++ties;
    }
  }
  if (policy == TiePolicy::Discordant) discordant += ties;
  const std::size_t used = concordant + discordant;
  if (used == 0) throw Error(ErrorCode::InsufficientData, "kendall-tau-like: no usable pairs");
  const double tau = (static_cast<double>(concordant) - static_cast<double>(discordant)) /
                     static_cast<double>(used);
  return {CorrelationKind::KendallTauLike, tau, used, ties, policy};
}

CorrelationResult abs_pearson(const Eigen::Ref<const Eigen::VectorXd>& metric,
                              const Eigen::Ref<const Eigen::VectorXd>& human) {
  if (metric.size() != human.size()) throw Error(ErrorCode::Contract, "abs-pearson: lengths differ");
  if (metric.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                "abs-pearson needs at least 3 points, got " + std::to_string(metric.size()));
  }
  if (!metric.allFinite() || !human.allFinite()) {
    throw Error(ErrorCode::Contract, "abs-pearson: non-finite input");
  }
  const auto r = stats::pearson(metric, human);
  if (!r) throw Error(ErrorCode::ZeroVariance, "abs-pearson: zero variance");
  return {CorrelationKind::AbsPearson, std::abs(*r), static_cast<std::size_t>(metric.size())};
}

CorrelationResult correlate_with_humans(std::span<const EvalExample> examples,
                                        const std::map<std::string, double>& segment_scores,
                                        TiePolicy policy) {
  std::vector<double> a;
  std::vector<double> b;
  bool saw_rr = false;
  bool saw_da = false;
  const auto score_of = [&](const std::string& id, double& out) {
    auto it = segment_scores.find(id);
    if (it == segment_scores.end()) return false;
    out = it->second;
    return true;
  };
  for (const auto& ex : examples) {
    if (ex.is_relative_ranking()) {
      saw_rr = true;
      double better = 0;
      double worse = 0;
      if (score_of(better_segment_id(ex.id), better) && score_of(worse_segment_id(ex.id), worse)) {
        a.push_back(better);
        b.push_back(worse);
      }
    } else if (ex.is_direct_assessment()) {
      saw_da = true;
      double metric = 0;
      if (score_of(ex.id, metric)) {
        a.push_back(metric);
        b.push_back(std::get<DirectAssessment>(*ex.human).score);
      }
    }
  }
  if (saw_rr && saw_da) {
    throw Error(ErrorCode::Validation, "dataset mixes relative-ranking and direct-assessment judgments");
  }
  if (!saw_rr && !saw_da) throw Error(ErrorCode::InsufficientData, "dataset has no human judgments");
  const Eigen::Map<const Eigen::VectorXd> va(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::Map<const Eigen::VectorXd> vb(b.data(), static_cast<Eigen::Index>(b.size()));
  return saw_rr ? kendall_tau_like(va, vb, policy) : abs_pearson(va, vb);
}

std::vector<MetaEvalRow> meta_evaluate(std::span<const EvalExample> examples,
                                       const std::map<std::string, double>& segment_scores,
                                       TiePolicy policy) {
  std::map<std::string, std::vector<EvalExample>> by_pair;
  for (const auto& ex : examples) by_pair[ex.src.lang.str() + "-" + ex.hyp.lang.str()].push_back(ex);
  std::vector<MetaEvalRow> rows;
  for (const auto& [pair, group] : by_pair) {
    rows.push_back({pair, correlate_with_humans(group, segment_scores, policy)});
  }
  rows.push_back({"all", correlate_with_humans(examples, segment_scores, policy)});
  return rows;
}

std::string meta_eval_tsv(std::span<const MetaEvalRow> rows) {
  std::ostringstream out;
  out << "lang_pair\tkind\tvalue\tn_used\tn_ties\ttie_policy\n";
  out << std::setprecision(17);
  for (const auto& row : rows) {
    out << row.lang_pair << '\t' << to_string(row.result.kind) << '\t' << row.result.value << '\t'
        << row.result.n_used << '\t' << row.result.n_ties << '\t' << to_string(row.result.tie_policy)
        << '\n';
  }
  return out.str();
}

std::string meta_eval_json(std::span<const MetaEvalRow> rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    obj["lang_pair"] = row.lang_pair;
    obj["kind"] = std::string(to_string(row.result.kind));
    obj["value"] = row.result.value;
    obj["n_used"] = row.result.n_used;
    obj["n_ties"] = row.result.n_ties;
    obj["tie_policy"] = std::string(to_string(row.result.tie_policy));
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::string meta_eval_text(std::span<const MetaEvalRow> rows) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "lang_pair" << std::setw(18) << "kind" << std::right
      << std::setw(10) << "value" << std::setw(9) << "n_used" << std::setw(8) << "n_ties" << '\n';
  for (const auto& row : rows) {
    out << std::left << std::setw(12) << row.lang_pair << std::setw(18) << to_string(row.result.kind)
        << std::right << std::fixed << std::setprecision(4) << std::setw(10) << row.result.value
        << std::setw(9) << row.result.n_used << std::setw(8) << row.result.n_ties << '\n';
  }
  return out.str();
}

}  // namespace datscore
