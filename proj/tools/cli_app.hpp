#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace datscore::cli {

// Everything that determines a run's results. Worker count and output paths
// are deliberately absent: they do not change the output bytes.
struct RunConfig {
  std::string backend = "toy";
  std::string dataset;
  std::string mode = "mt8";
  std::string term_weighting = "entropy";
  std::string averaging = "one-vs-rest";
  bool raw_sum = false;
  std::string tie_policy = "discordant";
  std::vector<std::string> include;
  std::vector<std::string> exclude;
  std::string trans1_lang;  // empty = policy default
  std::string trans2_lang;
  std::uint64_t seed = 42;
  std::size_t batch_size = 16;
  std::size_t vocab_size = 0;  // 0 = unchecked

  nlohmann::ordered_json to_json() const;
  // Accepts a bare config object or a run manifest carrying one under "config".
  static RunConfig from_json(const nlohmann::json& j);
};

// Exit codes: 0 ok, 1 internal error, 2 input/validation error, 3 backend
// error, 4 insufficient data.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace datscore::cli
