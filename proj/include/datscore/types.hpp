#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace datscore {

// Lowercase two-or-three-letter language tag ("en", "fr", "es"). Only the
// shape is checked; which languages actually work is up to the backend.
class LanguageCode {
 public:
  explicit LanguageCode(std::string code);

  static bool is_valid(std::string_view code);

  const std::string& str() const noexcept { return code_; }

  friend bool operator==(const LanguageCode&, const LanguageCode&) = default;
  friend auto operator<=>(const LanguageCode&, const LanguageCode&) = default;

 private:
  std::string code_;
};

enum class EntityKind { Src, Ref, Hypo, Trans1, Trans2 };

std::string_view to_string(EntityKind kind);
EntityKind parse_entity_kind(std::string_view name);

struct Entity {
  EntityKind kind;
  std::string text;
  LanguageCode lang;
};

// A generation direction from -> to, scored as log P(to | from).
struct Direction {
  EntityKind from;
  EntityKind to;

  // "src->hypo"
  std::string name() const;
  static Direction parse(std::string_view name);

  friend bool operator==(const Direction&, const Direction&) = default;
  friend auto operator<=>(const Direction&, const Direction&) = default;
};

struct DirectAssessment {
  double score;
};

struct RelativeRanking {
  Entity better;
  Entity worse;
};

using HumanJudgment = std::variant<DirectAssessment, RelativeRanking>;

struct EvalExample {
  std::string id;
  Entity src;
  Entity ref;
  // For relative-ranking records this is the preferred hypothesis.
  Entity hyp;
  std::optional<Entity> trans1;
  std::optional<Entity> trans2;
  std::optional<HumanJudgment> human;

  bool is_relative_ranking() const {
    return human && std::holds_alternative<RelativeRanking>(*human);
  }
  bool is_direct_assessment() const {
    return human && std::holds_alternative<DirectAssessment>(*human);
  }

  // nullptr when the entity is absent (only possible for Trans1/Trans2).
  const Entity* entity(EntityKind kind) const;
};

// One scored hypothesis. Relative-ranking examples expand into two segments
// "<id>#better" and "<id>#worse"; every other example is one segment "<id>".
struct Segment {
  std::string id;
  std::size_t example_index;
  Entity hyp;
};

std::string better_segment_id(std::string_view example_id);
std::string worse_segment_id(std::string_view example_id);

std::vector<Segment> expand_segments(std::span<const EvalExample> examples);

std::string trim(std::string_view text);

}  // namespace datscore
