#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "gacc/snapshot.hpp"

namespace gacc {

// One row of the group-to-actor score matrix S: the scores a single base
// group assigns to external actors. Only nonzero scores are stored; group
// members are never present.
struct GroupActorScores {
  GroupKey group;
  std::vector<std::pair<ActorIndex, double>> entries;  // ascending by actor

  double scoreOf(ActorIndex actor) const {
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), actor,
        [](const auto& e, ActorIndex a) { return e.first < a; });
    if (it == entries.end() || it->first != actor) return 0.0;
    return it->second;
  }
};

}  // namespace gacc
