#include "datscore/types.hpp"

#include <algorithm>
#include <cctype>

#include "datscore/errors.hpp"

namespace datscore {

LanguageCode::LanguageCode(std::string code) : code_(std::move(code)) {
  if (!is_valid(code_)) {
    throw Error(ErrorCode::Validation, "invalid language code '" + code_ + "'");
  }
}

bool LanguageCode::is_valid(std::string_view code) {
  if (code.size() < 2 || code.size() > 3) return false;
  return std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Src: return "src";
    case EntityKind::Ref: return "ref";
    case EntityKind::Hypo: return "hypo";
    case EntityKind::Trans1: return "trans1";
    case EntityKind::Trans2: return "trans2";
  }
  return "?";
}

EntityKind parse_entity_kind(std::string_view name) {
  for (auto kind : {EntityKind::Src, EntityKind::Ref, EntityKind::Hypo, EntityKind::Trans1,
                    EntityKind::Trans2}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::Validation, "unknown entity '" + std::string(name) + "'");
}

std::string Direction::name() const {
  std::string out(to_string(from));
  out += "->";
  out += to_string(to);
  return out;
}

Direction Direction::parse(std::string_view name) {
  const auto arrow = name.find("->");
  if (arrow == std::string_view::npos) {
    throw Error(ErrorCode::Validation, "direction '" + std::string(name) + "' lacks '->'");
  }
  Direction d{parse_entity_kind(name.substr(0, arrow)), parse_entity_kind(name.substr(arrow + 2))};
  if (d.from == d.to) {
    throw Error(ErrorCode::Validation, "direction '" + std::string(name) + "' has from == to");
  }
  return d;
}

const Entity* EvalExample::entity(EntityKind kind) const {
  switch (kind) {
    case EntityKind::Src: return &src;
    case EntityKind::Ref: return &ref;
    case EntityKind::Hypo: return &hyp;
    case EntityKind::Trans1: return trans1 ? &*trans1 : nullptr;
    case EntityKind::Trans2: return trans2 ? &*trans2 : nullptr;
  }
  return nullptr;
}

std::string better_segment_id(std::string_view example_id) {
  return std::string(example_id) + "#better";
}

std::string worse_segment_id(std::string_view example_id) {
  return std::string(example_id) + "#worse";
}

std::vector<Segment> expand_segments(std::span<const EvalExample> examples) {
  std::vector<Segment> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (ex.is_relative_ranking()) {
      const auto& rr = std::get<RelativeRanking>(*ex.human);
      out.push_back({better_segment_id(ex.id), i, rr.better});
      out.push_back({worse_segment_id(ex.id), i, rr.worse});
    } else {
      out.push_back({ex.id, i, ex.hyp});
    }
  }
  return out;
}

std::string trim(std::string_view text) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  auto begin = text.begin();
  auto end = text.end();
  while (begin != end && is_space(static_cast<unsigned char>(*begin))) ++begin;
  while (end != begin && is_space(static_cast<unsigned char>(*(end - 1)))) --end;
  return std::string(begin, end);
}

}  // namespace datscore
