#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datscore/types.hpp"

namespace datscore {

// JSON Lines dataset I/O. Field order on output is fixed:
//   DA:  id, src, src_lang, ref, hyp, tgt_lang, human
//   RR:  id, src, src_lang, ref, hyp_better, hyp_worse, tgt_lang
// followed by the optional trans1, trans1_lang, trans2, trans2_lang.
// Records without a judgment use the DA layout minus "human".
std::vector<EvalExample> parse_dataset(std::istream& in, std::string_view source_name);
std::vector<EvalExample> read_dataset(const std::filesystem::path& path);

std::string serialize_example(const EvalExample& example);
void write_dataset(std::ostream& out, std::span<const EvalExample> examples);
void write_dataset(const std::filesystem::path& path, std::span<const EvalExample> examples);

struct Violation {
  std::string id;
  std::size_t index;  // 0-based record position
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool accepted() const { return violations.empty(); }
};

ValidationReport validate_dataset(std::span<const EvalExample> examples);

// FNV-1a 64-bit over raw bytes, rendered as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);
std::string file_content_hash(const std::filesystem::path& path);

}  // namespace datscore
