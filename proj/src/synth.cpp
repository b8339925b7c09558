#include "datscore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "datscore/errors.hpp"
#include "datscore/rng.hpp"

namespace datscore {

double Xoshiro256StarStar::gaussian() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SynthData synth_generate(const SynthOptions& options) {
  if (!(options.noise >= 0.0) || !std::isfinite(options.noise)) {
    throw Error(ErrorCode::Validation, "synth noise must be finite and >= 0");
  }
  const auto directions = DirectionSet::full(options.mode);
  if (options.outlier && !directions.contains(*options.outlier)) {
    throw Error(ErrorCode::Validation,
                "outlier direction " + options.outlier->name() + " is not part of the mode");
  }

  Xoshiro256StarStar rng(options.seed);
  const LanguageCode de("de");
  const LanguageCode en("en");
  const LanguageCode es("es");

  SynthData data;
  std::vector<double> quality;  // per segment, expand_segments order
  for (std::size_t i = 0; i < options.n; ++i) {
    double a = rng.uniform();
    double b = rng.uniform();
    while (a == b) b = rng.uniform();
    quality.push_back(std::max(a, b));
    quality.push_back(std::min(a, b));

    const auto tag = std::to_string(i);
    EvalExample ex{
        .id = "syn" + tag,
        .src = {EntityKind::Src, "quelle " + tag, de},
        .ref = {EntityKind::Ref, "reference " + tag, en},
        .hyp = {EntityKind::Hypo, "better hypothesis " + tag, en},
        .trans1 = Entity{EntityKind::Trans1, "source translation " + tag, en},
        .trans2 = Entity{EntityKind::Trans2, "referencia " + tag, es},
        .human = std::nullopt,
    };
    ex.human = RelativeRanking{ex.hyp, {EntityKind::Hypo, "worse hypothesis " + tag, en}};
    data.examples.push_back(std::move(ex));
  }

  const auto segments = expand_segments(data.examples);
  const std::size_t k = directions.size();
  std::vector<double> values(segments.size() * k);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t c = 0; c < k; ++c) {
      const double sign = options.outlier && directions[c] == *options.outlier ? -1.0 : 1.0;
      values[s * k + c] = sign * options.signal * quality[s] + options.noise * rng.gaussian();
    }
  }
  const double shift = (values.empty() ? 0.0 : *std::max_element(values.begin(), values.end())) + 0.5;

  for (std::size_t s = 0; s < segments.size(); ++s) {
    for (std::size_t c = 0; c < k; ++c) {
      const double v = values[s * k + c] - shift;
      TokenTrace trace{{"syn", "tok"}, Eigen::Vector2d(v, v),
                       Eigen::Vector2d(0.5 + 2.5 * rng.uniform(), 0.5 + 2.5 * rng.uniform())};
      data.traces.insert({segments[s].id, directions[c]}, std::move(trace));
    }
  }
  return data;
}

}  // namespace datscore
