#include "cli_app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "datscore/ablation.hpp"
#include "datscore/dataset.hpp"
#include "datscore/errors.hpp"
#include "datscore/meta_eval.hpp"
#include "datscore/pipeline.hpp"
#include "datscore/synth.hpp"

namespace datscore::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::Validation:
      return 2;
    case ErrorCode::UnsupportedLanguage:
    case ErrorCode::EmptyInput:
    case ErrorCode::BackendUnavailable:
    case ErrorCode::TranslateUnsupported:
    case ErrorCode::MissingTrace:
    case ErrorCode::ExclusionLimit:
      return 3;
    case ErrorCode::InsufficientData:
    case ErrorCode::ZeroVariance:
      return 4;
    case ErrorCode::Contract:
      return 1;
  }
  return 1;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write '" + path.string() + "'");
  out << text;
}

// Flags shared by score / augment / ablate. Each is applied on top of the
// config file only when given on the command line.
struct RunFlags {
  std::string config_path;
  RunConfig values;
  std::map<std::string, CLI::Option*> given;
  std::size_t workers = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file or run manifest; flags override it");
    given["dataset"] = cmd->add_option("--dataset", values.dataset, "Dataset (JSON Lines)");
    given["backend"] = cmd->add_option("--backend", values.backend, "toy | trace:<path> | http:<url>");
    given["mode"] = cmd->add_option("--mode", values.mode, "mt8 | ref4");
    given["term_weighting"] = cmd->add_option("--term-weighting", values.term_weighting, "entropy | uniform");
    given["averaging"] = cmd->add_option("--averaging", values.averaging, "one-vs-rest | uniform");
    given["raw_sum"] = cmd->add_flag("--raw-sum", values.raw_sum, "Unnormalized term weights (sum instead of mean)");
    given["tie_policy"] = cmd->add_option("--tie-policy", values.tie_policy, "discordant | excluded");
    given["include"] = cmd->add_option("--include", values.include, "Directions to keep, e.g. src->hypo")->delimiter(',');
    given["exclude"] = cmd->add_option("--exclude", values.exclude, "Directions to drop")->delimiter(',');
    given["trans1_lang"] = cmd->add_option("--trans1-lang", values.trans1_lang, "Override Trans1 language");
    given["trans2_lang"] = cmd->add_option("--trans2-lang", values.trans2_lang, "Override Trans2 language");
    given["seed"] = cmd->add_option("--seed", values.seed, "Seed recorded in the manifest");
    given["batch_size"] = cmd->add_option("--batch-size", values.batch_size, "HTTP batch size");
    given["vocab_size"] = cmd->add_option("--vocab-size", values.vocab_size,
                                          "Backend vocabulary size for entropy bound checks (0 = off)");
    cmd->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path, std::ios::binary);
      if (!in) throw Error(ErrorCode::Parse, "cannot open config '" + config_path + "'");
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, "config '" + config_path + "': " + e.what());
      }
      cfg = RunConfig::from_json(j);
    }
    const auto set = [&](const char* name) { return given.at(name)->count() > 0; };
    if (set("dataset")) cfg.dataset = values.dataset;
    if (set("backend")) cfg.backend = values.backend;
    if (set("mode")) cfg.mode = values.mode;
    if (set("term_weighting")) cfg.term_weighting = values.term_weighting;
    if (set("averaging")) cfg.averaging = values.averaging;
    if (set("raw_sum")) cfg.raw_sum = values.raw_sum;
    if (set("tie_policy")) cfg.tie_policy = values.tie_policy;
    if (set("include")) cfg.include = values.include;
    if (set("exclude")) cfg.exclude = values.exclude;
    if (set("trans1_lang")) cfg.trans1_lang = values.trans1_lang;
    if (set("trans2_lang")) cfg.trans2_lang = values.trans2_lang;
    if (set("seed")) cfg.seed = values.seed;
    if (set("batch_size")) cfg.batch_size = values.batch_size;
    if (set("vocab_size")) cfg.vocab_size = values.vocab_size;
    return cfg;
  }
};

std::vector<Direction> parse_directions(const std::vector<std::string>& names) {
  std::vector<Direction> out;
  for (const auto& n : names) out.push_back(Direction::parse(n));
  return out;
}

DirectionSet directions_of(const RunConfig& cfg) {
  const auto include = parse_directions(cfg.include);
  const auto exclude = parse_directions(cfg.exclude);
  return select_directions(parse_direction_mode(cfg.mode), include, exclude);
}

AugmentPolicy policy_of(const RunConfig& cfg) {
  AugmentPolicy policy;
  if (!cfg.trans1_lang.empty()) policy.trans1_lang = LanguageCode(cfg.trans1_lang);
  if (!cfg.trans2_lang.empty()) policy.trans2_lang = LanguageCode(cfg.trans2_lang);
  return policy;
}

std::unique_ptr<ProbBackend> backend_of(const RunConfig& cfg) {
  BackendOptions options{.batch_size = cfg.batch_size, .vocab_size = std::nullopt};
  if (cfg.vocab_size > 0) options.vocab_size = cfg.vocab_size;
  return make_backend(cfg.backend, options);
}

std::vector<EvalExample> load_valid_dataset(const RunConfig& cfg, std::ostream& err) {
  if (cfg.dataset.empty()) throw Error(ErrorCode::Validation, "no dataset given (--dataset)");
  auto examples = read_dataset(cfg.dataset);
  const auto report = validate_dataset(examples);
  if (!report.accepted()) {
    for (const auto& v : report.violations) {
      err << cfg.dataset << ": record " << v.index + 1 << " (id '" << v.id << "'): " << v.message << '\n';
    }
    throw Error(ErrorCode::Validation, "dataset '" + cfg.dataset + "' has " +
                                           std::to_string(report.violations.size()) + " violation(s)");
  }
  return examples;
}

// Fills missing augmentations the direction set needs, if the backend can.
std::vector<EvalExample> ensure_augmented(std::vector<EvalExample> examples, const DirectionSet& directions,
                                          const RunConfig& cfg, const ProbBackend& backend,
                                          std::size_t workers) {
  const auto targets = augment_targets(directions);
  if (!needs_augmentation(examples, targets)) return examples;
  if (!backend.can_translate()) {
    throw Error(ErrorCode::TranslateUnsupported,
                "dataset lacks augmented translations and backend '" + backend.identity() +
                    "' cannot translate");
  }
  return augment_dataset(examples, policy_of(cfg), backend, targets, workers);
}

int cmd_score(const RunFlags& flags, const std::string& out_path, std::string manifest_path,
              std::ostream& out, std::ostream& err) {
  const auto cfg = flags.resolve();
  const auto directions = directions_of(cfg);
  const auto scheme = parse_term_scheme(cfg.term_weighting);
  const auto averaging = parse_averaging(cfg.averaging);
  auto examples = load_valid_dataset(cfg, err);
  const auto dataset_hash = file_content_hash(cfg.dataset);
  const auto backend = backend_of(cfg);

  examples = ensure_augmented(std::move(examples), directions, cfg, *backend, flags.workers);
  const auto matrix =
      score_matrix(examples, directions, *backend, scheme, cfg.raw_sum, {.workers = flags.workers});
  for (const auto& ex : matrix.exclusions) err << "excluded " << ex.example_id << ": " << ex.reason << '\n';
  const auto weights = direction_weights(matrix, averaging);
  const Eigen::VectorXd scores = datscore(matrix, weights);

  {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw Error(ErrorCode::Parse, "cannot write '" + out_path + "'");
    write_scores(file, matrix, scores);
  }

  ordered_json manifest;
  manifest["tool"] = "datscore";
  manifest["command"] = "score";
  manifest["config"] = cfg.to_json();
  manifest["dataset_hash"] = "fnv1a64:" + dataset_hash;
  manifest["backend"] = backend->identity();
  auto dirs = ordered_json::array();
  for (const auto& d : directions.directions()) dirs.push_back(d.name());
  manifest["directions"] = std::move(dirs);
  ordered_json w = ordered_json::object();
  for (std::size_t i = 0; i < weights.directions.size(); ++i) {
    w[weights.directions[i].name()] = weights.values(static_cast<Eigen::Index>(i));
  }
  manifest["direction_weights"] = std::move(w);
  manifest["weights_provenance"] = std::string(to_string(weights.provenance));
  manifest["rows"] = matrix.row_ids.size();
  auto excl = ordered_json::array();
  for (const auto& e : matrix.exclusions) excl.push_back({{"id", e.example_id}, {"reason", e.reason}});
  manifest["exclusions"] = std::move(excl);
  if (manifest_path.empty()) manifest_path = out_path + ".manifest.json";
  write_text(manifest_path, manifest.dump(2) + "\n");

  out << "scored " << matrix.row_ids.size() << " segments over " << directions.size() << " directions ("
      << to_string(weights.provenance) << " weights) -> " << out_path << '\n';
  return 0;
}

int cmd_augment(const RunFlags& flags, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto cfg = flags.resolve();
  const auto directions = directions_of(cfg);
  const auto examples = load_valid_dataset(cfg, err);
  const auto backend = backend_of(cfg);
  const auto augmented = ensure_augmented(examples, directions, cfg, *backend, flags.workers);
  write_dataset(fs::path(out_path), augmented);
  out << "wrote " << augmented.size() << " examples -> " << out_path << '\n';
  return 0;
}

int cmd_ablate(const RunFlags& flags, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto cfg = flags.resolve();
  const auto directions = directions_of(cfg);
  auto examples = load_valid_dataset(cfg, err);
  const auto backend = backend_of(cfg);
  examples = ensure_augmented(std::move(examples), directions, cfg, *backend, flags.workers);

  const AblationConfig acfg{directions, parse_term_scheme(cfg.term_weighting), parse_averaging(cfg.averaging),
                            cfg.raw_sum, parse_tie_policy(cfg.tie_policy), flags.workers};
  const auto report = ablation_report(examples, *backend, acfg, {.workers = flags.workers});
  if (!out_path.empty()) {
    write_text(out_path, report.to_tsv());
    write_text(out_path + ".json", report.to_json());
  }
  out << report.to_text();
  return 0;
}

int cmd_meta_eval(const std::string& dataset, const std::string& scores_path, const std::string& tie_policy,
                  const std::string& out_path, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.dataset = dataset;
  const auto examples = load_valid_dataset(cfg, err);
  std::ifstream in(scores_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open scores '" + scores_path + "'");
  std::map<std::string, double> scores;
  for (auto& [id, value] : read_scores(in, scores_path)) {
    if (!scores.emplace(id, value).second) {
      throw Error(ErrorCode::Validation, "duplicate id '" + id + "' in scores '" + scores_path + "'");
    }
  }
  const auto rows = meta_evaluate(examples, scores, parse_tie_policy(tie_policy));
  if (!out_path.empty()) {
    write_text(out_path, meta_eval_tsv(rows));
    write_text(out_path + ".json", meta_eval_json(rows));
  }
  out << meta_eval_text(rows);
  return 0;
}

struct SynthFlags {
  std::size_t n = 100;
  double noise = 0.0;
  double signal = 1.0;
  std::string outlier;
  std::uint64_t seed = 42;
  std::string mode = "mt8";
  std::string out_dataset;
  std::string out_traces;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SynthOptions options{.n = f.n, .noise = f.noise, .signal = f.signal, .outlier = std::nullopt,
                       .seed = f.seed, .mode = parse_direction_mode(f.mode)};
  if (!f.outlier.empty()) options.outlier = Direction::parse(f.outlier);
  const auto data = synth_generate(options);
  write_dataset(fs::path(f.out_dataset), data.examples);
  data.traces.write(fs::path(f.out_traces));
  out << "wrote " << data.examples.size() << " examples -> " << f.out_dataset << ", " << data.traces.size()
      << " traces -> " << f.out_traces << '\n';
  return 0;
}

int cmd_validate(const std::string& dataset, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.dataset = dataset;
  const auto examples = load_valid_dataset(cfg, err);
  out << dataset << ": " << examples.size() << " records, 0 violations\n";
  return 0;
}

}  // namespace

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["backend"] = backend;
  j["dataset"] = dataset;
  j["mode"] = mode;
  j["term_weighting"] = term_weighting;
  j["averaging"] = averaging;
  j["raw_sum"] = raw_sum;
  j["tie_policy"] = tie_policy;
  j["include"] = include;
  j["exclude"] = exclude;
  j["trans1_lang"] = trans1_lang;
  j["trans2_lang"] = trans2_lang;
  j["seed"] = seed;
  j["batch_size"] = batch_size;
  j["vocab_size"] = vocab_size;
  return j;
}

RunConfig RunConfig::from_json(const json& root) {
  RunConfig cfg;
  const json& j = root.contains("config") ? root.at("config") : root;
  try {
    if (!j.is_object()) throw Error(ErrorCode::Parse, "config is not a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "backend") cfg.backend = value.get<std::string>();
      else if (key == "dataset") cfg.dataset = value.get<std::string>();
      else if (key == "mode") cfg.mode = value.get<std::string>();
      else if (key == "term_weighting") cfg.term_weighting = value.get<std::string>();
      else if (key == "averaging") cfg.averaging = value.get<std::string>();
      else if (key == "raw_sum") cfg.raw_sum = value.get<bool>();
      else if (key == "tie_policy") cfg.tie_policy = value.get<std::string>();
      else if (key == "include") cfg.include = value.get<std::vector<std::string>>();
      else if (key == "exclude") cfg.exclude = value.get<std::vector<std::string>>();
      else if (key == "trans1_lang") cfg.trans1_lang = value.get<std::string>();
      else if (key == "trans2_lang") cfg.trans2_lang = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "batch_size") cfg.batch_size = value.get<std::size_t>();
      else if (key == "vocab_size") cfg.vocab_size = value.get<std::size_t>();
      else throw Error(ErrorCode::Parse, "unknown config key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed config: ") + e.what());
  }
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translation evaluation by multi-direction forced decoding", "datscore"};
  app.require_subcommand(1);

  RunFlags score_flags;
  std::string score_out;
  std::string score_manifest;
  auto* score = app.add_subcommand("score", "Score hypotheses; writes JSON Lines scores and a run manifest");
  score_flags.attach(score);
  score->add_option("--out", score_out, "Scores output (JSON Lines)")->required();
  score->add_option("--manifest", score_manifest, "Manifest path (default <out>.manifest.json)");

  RunFlags augment_flags;
  std::string augment_out;
  auto* augment = app.add_subcommand("augment", "Fill trans1/trans2 with backend translations");
  augment_flags.attach(augment);
  augment->add_option("--out", augment_out, "Augmented dataset output")->required();

  RunFlags ablate_flags;
  std::string ablate_out;
  auto* ablate = app.add_subcommand("ablate", "Per-direction, leave-one-out and weighting ablations");
  ablate_flags.attach(ablate);
  ablate->add_option("--out", ablate_out, "Report TSV (a JSON mirror goes to <out>.json)");

  std::string me_dataset;
  std::string me_scores;
  std::string me_ties = "discordant";
  std::string me_out;
  auto* meta = app.add_subcommand("meta-eval", "Correlate a scores file with human judgments");
  meta->add_option("--dataset", me_dataset, "Dataset with judgments")->required();
  meta->add_option("--scores", me_scores, "Scores file from `score`")->required();
  meta->add_option("--tie-policy", me_ties, "discordant | excluded");
  meta->add_option("--out", me_out, "Report TSV (a JSON mirror goes to <out>.json)");

  SynthFlags sf;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and matching trace file");
  synth->add_option("--n", sf.n, "Number of relative-ranking examples");
  synth->add_option("--noise", sf.noise, "Gaussian noise scale");
  synth->add_option("--signal", sf.signal, "Quality coefficient (0 = pure noise)");
  synth->add_option("--outlier", sf.outlier, "Anti-correlated direction, e.g. trans1->hypo");
  synth->add_option("--seed", sf.seed, "PRNG seed");
  synth->add_option("--mode", sf.mode, "mt8 | ref4");
  synth->add_option("--out-dataset", sf.out_dataset, "Dataset output")->required();
  synth->add_option("--out-traces", sf.out_traces, "Trace file output")->required();

  std::string validate_dataset_path;
  auto* validate = app.add_subcommand("validate", "Check a dataset against the record invariants");
  validate->add_option("--dataset", validate_dataset_path, "Dataset (JSON Lines)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (score->parsed()) return cmd_score(score_flags, score_out, score_manifest, out, err);
    if (augment->parsed()) return cmd_augment(augment_flags, augment_out, out, err);
    if (ablate->parsed()) return cmd_ablate(ablate_flags, ablate_out, out, err);
    if (meta->parsed()) return cmd_meta_eval(me_dataset, me_scores, me_ties, me_out, out, err);
    if (synth->parsed()) return cmd_synth(sf, out);
    if (validate->parsed()) return cmd_validate(validate_dataset_path, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace datscore::cli
