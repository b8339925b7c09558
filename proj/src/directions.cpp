#include "datscore/directions.hpp"

#include <algorithm>

#include "datscore/errors.hpp"

namespace datscore {

std::string_view to_string(DirectionMode mode) { return mode == DirectionMode::MT8 ? "mt8" : "ref4"; }

DirectionMode parse_direction_mode(std::string_view name) {
  if (name == "mt8") return DirectionMode::MT8;
  if (name == "ref4") return DirectionMode::REF4;
  throw Error(ErrorCode::Validation, "unknown mode '" + std::string(name) + "' (expected mt8 or ref4)");
}

DirectionSet DirectionSet::full(DirectionMode mode) {
  using enum EntityKind;
  std::vector<EntityKind> partners =
      mode == DirectionMode::MT8 ? std::vector{Src, Ref, Trans1, Trans2} : std::vector{Ref, Trans2};
  std::vector<Direction> dirs;
  for (auto p : partners) {
    dirs.push_back({p, Hypo});
    dirs.push_back({Hypo, p});
  }
  return DirectionSet(mode, std::move(dirs));
}

DirectionSet DirectionSet::subset(DirectionMode mode, std::vector<Direction> directions) {
  if (directions.empty()) throw Error(ErrorCode::Validation, "direction set is empty");
  const auto all = full(mode);
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (!all.contains(directions[i])) {
      throw Error(ErrorCode::Validation, "direction " + directions[i].name() + " is not part of mode " +
                                             std::string(to_string(mode)));
    }
    if (std::find(directions.begin(), directions.begin() + static_cast<std::ptrdiff_t>(i),
                  directions[i]) != directions.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw Error(ErrorCode::Validation, "direction " + directions[i].name() + " listed twice");
    }
  }
  return DirectionSet(mode, std::move(directions));
}

std::optional<std::size_t> DirectionSet::index_of(const Direction& d) const {
  auto it = std::find(directions_.begin(), directions_.end(), d);
  if (it == directions_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - directions_.begin());
}

DirectionSet DirectionSet::without(const Direction& d) const {
  std::vector<Direction> rest;
  std::copy_if(directions_.begin(), directions_.end(), std::back_inserter(rest),
               [&](const Direction& x) { return x != d; });
  return subset(mode_, std::move(rest));
}

DirectionSet DirectionSet::only(const Direction& d) const { return subset(mode_, {d}); }

bool DirectionSet::uses(EntityKind kind) const {
  return std::any_of(directions_.begin(), directions_.end(),
                     [&](const Direction& d) { return d.from == kind || d.to == kind; });
}

DirectionSet select_directions(DirectionMode mode, std::span<const Direction> include,
                               std::span<const Direction> exclude) {
  auto set = include.empty() ? DirectionSet::full(mode)
                             : DirectionSet::subset(mode, {include.begin(), include.end()});
  for (const auto& d : exclude) {
    if (!DirectionSet::full(mode).contains(d)) {
      throw Error(ErrorCode::Validation, "excluded direction " + d.name() + " is not part of mode " +
                                             std::string(to_string(mode)));
    }
    if (set.contains(d)) set = set.without(d);
  }
  return set;
}

}  // namespace datscore
