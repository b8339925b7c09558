#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "datscore/types.hpp"

namespace datscore {

enum class DirectionMode { MT8, REF4 };

std::string_view to_string(DirectionMode mode);
DirectionMode parse_direction_mode(std::string_view name);

// Ordered set of hypothesis-centred directions. MT8 connects Hypo with Src,
// Ref, Trans1 and Trans2 in both orientations; REF4 only with Ref and Trans2.
// A set may be a non-empty subset of its mode's full set (ablations, user
// include/exclude lists).
class DirectionSet {
 public:
  static DirectionSet full(DirectionMode mode);
  // Throws Error(Validation) for directions outside the mode, duplicates or an empty list.
  static DirectionSet subset(DirectionMode mode, std::vector<Direction> directions);

  DirectionMode mode() const { return mode_; }
  const std::vector<Direction>& directions() const { return directions_; }
  std::size_t size() const { return directions_.size(); }
  const Direction& operator[](std::size_t i) const { return directions_[i]; }

  std::optional<std::size_t> index_of(const Direction& d) const;
  bool contains(const Direction& d) const { return index_of(d).has_value(); }

  DirectionSet without(const Direction& d) const;
  DirectionSet only(const Direction& d) const;

  // True if any direction touches the given entity.
  bool uses(EntityKind kind) const;

 private:
  DirectionSet(DirectionMode mode, std::vector<Direction> directions)
      : mode_(mode), directions_(std::move(directions)) {}

  DirectionMode mode_;
  std::vector<Direction> directions_;
};

// Applies include (if non-empty) then exclude to the mode's full set.
DirectionSet select_directions(DirectionMode mode, std::span<const Direction> include,
                               std::span<const Direction> exclude);

}  // namespace datscore
