// One PASS/FAIL line per headline criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "cli_app.hpp"
#include "datscore/dataset.hpp"
#include "datscore/errors.hpp"
#include "datscore/meta_eval.hpp"
#include "datscore/pipeline.hpp"
#include "datscore/stats.hpp"
#include "datscore/synth.hpp"
#include "datscore/toy_backend.hpp"
#include "datscore/trace_store.hpp"
#include "oracle/oracle.hpp"

using namespace datscore;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

TokenTrace trace_of(std::vector<double> lp, std::vector<double> h) {
  TokenTrace t;
  t.tokens.assign(lp.size(), "x");
  t.logprobs = Eigen::Map<Eigen::VectorXd>(lp.data(), static_cast<Eigen::Index>(lp.size()));
  t.entropies = Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  return t;
}

Outcome term_weight_units() {
  const ToyBackend uniform_case(ToyCorpus{{{{"en", "a b c"}, {"fr", "x"}}}});
  const auto t = uniform_case.forced_score({"zzz", LanguageCode("fr"), "a", LanguageCode("en"), std::nullopt});
  const double h_uniform = t.entropies(0);
  Eigen::VectorXd point(4);
  point << 0, 0, 1, 0;
  const double h_point = stats::entropy_nats(point);
  const auto degenerate = term_weights(trace_of({-0.0}, {h_point}), TermScheme::Entropy);
  const auto mixed = term_weights(trace_of({-1, -1, -1}, {0.0, 1.0, 3.0}), TermScheme::Entropy);
  const bool ok = std::abs(h_uniform - 1.3862944) <= 1e-7 && std::abs(h_uniform - std::log(4.0)) <= 1e-9 &&
                  h_point == 0.0 && degenerate.weights(0) == 1.0 && mixed.weights(0) == 0.0 &&
                  std::abs(mixed.weights(2) - 0.75) <= 1e-12;
  return {ok, "H(uniform v=4)=" + fmt(h_uniform, 9) + " H(point)=" + fmt(h_point) +
                  " zero-entropy step weight=" + fmt(mixed.weights(0))};
}

Outcome direction_score_oracle() {
  const ToyBackend backend;
  const auto examples = augment_dataset(read_dataset(DATSCORE_FIXTURE), {}, backend);
  const oracle::ToyModel model(fixture_corpus().entries, 0.5);
  const auto items = oracle::load_items(DATSCORE_FIXTURE);
  double worst = 0;
  double secs = 0;
  for (bool entropy : {true, false}) {
    const auto t0 = Clock::now();
    const auto m = score_matrix(examples, DirectionSet::full(DirectionMode::MT8), backend,
                                entropy ? TermScheme::Entropy : TermScheme::Uniform);
    secs += seconds_since(t0);
    const auto expected = oracle::mt8_pipeline(model, items, entropy, true);
    if (m.values.rows() != 8 || m.values.cols() != 8) return {false, "matrix is not 8x8"};
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index d = 0; d < 8; ++d) {
        worst = std::max(worst, std::abs(m.values(i, d) - expected.cells[static_cast<std::size_t>(i)]
                                                                        [static_cast<std::size_t>(d)]));
      }
    }
  }
  return {worst <= 1e-12 && secs < 1.0, "max |diff|=" + fmt(worst) + " over 2x8x8 cells, " + fmt(secs) + " s"};
}

Outcome one_vs_rest_algebra() {
  auto as_matrix = [](const Eigen::MatrixXd& v) {
    ScoreMatrix m;
    const auto full = DirectionSet::full(DirectionMode::MT8).directions();
    m.directions = DirectionSet::subset(DirectionMode::MT8, {full.begin(), full.begin() + v.cols()});
    m.values = v;
    m.row_ids.resize(static_cast<std::size_t>(v.rows()));
    return m;
  };
  Eigen::MatrixXd same(5, 8);
  for (int c = 0; c < 8; ++c) same.col(c) << -1, -3, -2, -5, -4;
  const auto w_same = one_vs_rest_weights(as_matrix(same));
  const bool uniform_ok = (w_same.values.array() - 0.125).abs().maxCoeff() <= 1e-12;

  Eigen::MatrixXd anti(5, 3);
  anti.col(0) << 1, 2, 4, 7, 11;
  anti.col(1) = anti.col(0);
  anti.col(2) = -anti.col(0);
  const auto w_anti = one_vs_rest_weights(as_matrix(anti));
  const bool fallback_ok = w_anti.provenance == DirectionWeights::Provenance::UniformAvg &&
                           (w_anti.values.array() - 1.0 / 3).abs().maxCoeff() <= 1e-12;

  const ToyBackend backend;
  const auto examples = augment_dataset(read_dataset(DATSCORE_FIXTURE), {}, backend);
  const auto m = score_matrix(examples, DirectionSet::full(DirectionMode::MT8), backend, TermScheme::Entropy);
  const auto w = one_vs_rest_weights(m);
  const oracle::ToyModel model(fixture_corpus().entries, 0.5);
  const auto expected = oracle::mt8_pipeline(model, oracle::load_items(DATSCORE_FIXTURE), true, true);
  double worst = 0;
  for (Eigen::Index d = 0; d < 8; ++d) {
    worst = std::max(worst, std::abs(w.values(d) - expected.weights[static_cast<std::size_t>(d)]));
  }
  return {uniform_ok && fallback_ok && worst <= 1e-9,
          std::string("identical->uniform ") + (uniform_ok ? "ok" : "bad") + ", antisymmetric->fallback " +
              (fallback_ok ? "ok" : "bad") + ", fixture weights max |diff|=" + fmt(worst)};
}

Outcome kendall_suite() {
  Eigen::VectorXd better(5), worse(5);
  better << 3, 3, 3, 1, 2;
  worse << 2, 2, 2, 2, 2;
  const double disc = kendall_tau_like(better, worse, TiePolicy::Discordant).value;
  const double excl = kendall_tau_like(better, worse, TiePolicy::Excluded).value;

  // Swapping every pair negates tau exactly when no pair is tied, under both
  // policies; with ties it holds exactly under Excluded.
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> len(1, 40);
  std::uniform_int_distribution<int> coin(0, 9);
  std::normal_distribution<double> g;
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = len(rng);
    Eigen::VectorXd a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a(i) = g(rng);
      b(i) = coin(rng) == 0 ? a(i) : g(rng);  // some exact ties
    }
    Eigen::VectorXd b_untied = b;
    for (int i = 0; i < n; ++i) {
      if (b_untied(i) == a(i)) b_untied(i) += 1.0;
    }
    auto swap_ok = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y, TiePolicy p) {
      try {
        return kendall_tau_like(x, y, p).value == -kendall_tau_like(y, x, p).value;
      } catch (const Error& e) {
        return e.code() == ErrorCode::InsufficientData;
      }
    };
    if (!swap_ok(a, b, TiePolicy::Excluded) || !swap_ok(a, b_untied, TiePolicy::Excluded) ||
        !swap_ok(a, b_untied, TiePolicy::Discordant)) {
      ++failures;
    }
  }
  return {disc == 0.2 && excl == 0.5 && failures == 0,
          "(3,1,1): discordant=" + fmt(disc) + " excluded=" + fmt(excl) + ", antisymmetry failures=" +
              std::to_string(failures) + "/1000"};
}

std::pair<double, DirectionWeights> synth_tau(const SynthData& data, Averaging averaging) {
  const TraceBackend backend(data.traces, "trace:synth");
  const auto m = score_matrix(data.examples, DirectionSet::full(DirectionMode::MT8), backend, TermScheme::Uniform);
  auto w = direction_weights(m, averaging);
  const auto s = datscore::datscore(m, w);
  std::map<std::string, double> seg;
  for (std::size_t i = 0; i < m.row_ids.size(); ++i) seg[m.row_ids[i]] = s(static_cast<Eigen::Index>(i));
  return {correlate_with_humans(data.examples, seg).value, std::move(w)};
}

Outcome outlier_robustness() {
  const auto t0 = Clock::now();
  SynthOptions opts;
  opts.n = 1000;
  opts.noise = 0.3;
  opts.outlier = Direction::parse("trans1->hypo");
  opts.seed = 42;
  const auto data = synth_generate(opts);
  const auto [tau_ovr, w] = synth_tau(data, Averaging::OneVsRest);
  const auto [tau_uni, unused] = synth_tau(data, Averaging::Uniform);
  const double outlier = w.at(*opts.outlier);
  bool strictly_min = true;
  double runner_up = 1.0;
  for (const auto& d : w.directions) {
    if (d == *opts.outlier) continue;
    runner_up = std::min(runner_up, w.at(d));
    strictly_min = strictly_min && w.at(d) > outlier;
  }
  const double secs = seconds_since(t0);
  return {tau_ovr > tau_uni && strictly_min && secs < 10.0,
          "tau one-vs-rest=" + fmt(tau_ovr, 4) + " uniform=" + fmt(tau_uni, 4) + ", outlier weight=" +
              fmt(outlier, 4) + " next=" + fmt(runner_up, 4) + ", " + fmt(secs) + " s"};
}

Outcome noiseless_and_noise() {
  SynthOptions clean;
  clean.n = 100;
  const double tau_clean = synth_tau(synth_generate(clean), Averaging::OneVsRest).first;
  SynthOptions noise;
  noise.n = 10000;
  noise.noise = 1.0;
  noise.signal = 0.0;
  const double tau_noise = synth_tau(synth_generate(noise), Averaging::Uniform).first;
  return {tau_clean == 1.0 && std::abs(tau_noise) < 0.05,
          "noiseless tau=" + fmt(tau_clean) + ", pure-noise |tau|=" + fmt(std::abs(tau_noise), 3) + " (n=10000)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const auto dir = fs::path(DATSCORE_TMP) / "acceptance";
  fs::create_directories(dir);
  SynthOptions opts;
  opts.n = 60;
  opts.noise = 0.4;
  const auto data = synth_generate(opts);
  write_dataset(dir / "synth.jsonl", data.examples);
  data.traces.write(dir / "synth.traces.jsonl");

  struct Case {
    std::string name;
    std::string dataset;
    std::string backend;
  };
  const std::vector<Case> cases = {{"toy", DATSCORE_FIXTURE, "toy"},
                                   {"trace", (dir / "synth.jsonl").string(),
                                    "trace:" + (dir / "synth.traces.jsonl").string()}};
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "1", "8", "8"}) {
      const auto out = dir / (c.name + "." + std::to_string(outputs.size()) + ".jsonl");
      std::ostringstream sout, serr;
      const int code = cli::run({"score", "--dataset", c.dataset, "--backend", c.backend, "--workers", workers,
                                 "--out", out.string()},
                                sout, serr);
      if (code != 0) return {false, c.name + ": exit " + std::to_string(code) + ": " + serr.str()};
      outputs.push_back(slurp(out) + slurp(out.string() + ".manifest.json"));
    }
    const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const auto& s) { return s == outputs[0]; });
    ok = ok && same && !outputs[0].empty();
    detail += c.name + (same ? " identical" : " DIFFERS") + "; ";
  }
  return {ok, detail + "2 runs x workers {1,8}"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"term weights: degenerate and uniform step entropies", term_weight_units},
      {"direction scores equal the brute-force oracle (1e-12, < 1 s)", direction_score_oracle},
      {"one-vs-rest weight algebra and fixture weights (1e-9)", one_vs_rest_algebra},
      {"kendall tau-like cases and antisymmetry (1000 seeded)", kendall_suite},
      {"outlier direction: lowest weight, one-vs-rest beats uniform (< 10 s)", outlier_robustness},
      {"noiseless tau = 1 and pure-noise |tau| < 0.05", noiseless_and_noise},
      {"score output byte-identical across runs and worker counts", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << "  -- " << o.detail
              << '\n';
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " passed\n";
  return failed;
}
