#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gacc/sparse.hpp"

namespace gacc {

// Canonical identity of a group: a non-empty, strictly increasing member
// list. Equality and ordering on the member vector are the deduplication and
// tie-breaking rules used throughout.
struct GroupKey {
  std::vector<ActorIndex> members;

  static GroupKey of(std::vector<ActorIndex> raw) {
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    if (raw.empty()) throw std::invalid_argument("empty group");
    return GroupKey{std::move(raw)};
  }

  std::size_t size() const { return members.size(); }

  bool contains(ActorIndex a) const {
    return std::binary_search(members.begin(), members.end(), a);
  }

  // this \ {a}; a must be a member
  GroupKey without(ActorIndex a) const {
    GroupKey g;
    g.members.reserve(members.size() - 1);
    for (ActorIndex m : members) {
      if (m != a) g.members.push_back(m);
    }
    if (g.members.size() != members.size() - 1) {
      throw std::invalid_argument("actor not in group");
    }
    if (g.members.empty()) throw std::invalid_argument("empty group");
    return g;
  }

  // this ∪ {a}; a must not be a member
  GroupKey with(ActorIndex a) const {
    GroupKey g;
    g.members.reserve(members.size() + 1);
    bool placed = false;
    for (ActorIndex m : members) {
      if (m == a) throw std::invalid_argument("actor already in group");
      if (!placed && a < m) {
        g.members.push_back(a);
        placed = true;
      }
      g.members.push_back(m);
    }
    if (!placed) g.members.push_back(a);
    return g;
  }

  bool isSubsetOf(const GroupKey& other) const {
    return std::includes(other.members.begin(), other.members.end(),
                         members.begin(), members.end());
  }

  std::string describe() const {
    std::string s = "{";
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(members[i]);
    }
    return s + "}";
  }

  bool operator==(const GroupKey&) const = default;
  auto operator<=>(const GroupKey&) const = default;
};

struct GroupKeyHash {
  std::size_t operator()(const GroupKey& g) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (ActorIndex m : g.members) {
      h ^= m;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Immutable training-period view of both networks: the hypergraph of groups
// (incidence H) and the pairwise actor graph (adjacency A), with the degree
// vectors shared by all scorers. Safe to share read-only across threads.
struct NetworkSnapshot {
  std::size_t n = 0;                // actor count, including isolated actors
  std::vector<GroupKey> groups;     // the m unique hyperedges
  SparseMatrix incidence;           // n x m, 0/1
  SparseMatrix adjacency;           // n x n, symmetric, zero diagonal, 0/1
  std::vector<double> vertexDegree; // per-actor group count (unit weights)
  std::vector<double> edgeDegree;   // per-group cardinality
};

inline NetworkSnapshot buildSnapshot(std::vector<GroupKey> groups,
                                     std::size_t n) {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].members.empty() && groups[i].members.back() >= n) {
      throw std::invalid_argument("group " + groups[i].describe() +
                                  " has member index outside actor range [0," +
                                  std::to_string(n) + ")");
    }
  }
  {
    std::vector<GroupKey> sorted = groups;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("duplicate group in snapshot input");
    }
  }

  NetworkSnapshot snap;
  snap.n = n;
  snap.groups = std::move(groups);
  const std::size_t m = snap.groups.size();

  std::vector<Triplet> inc;
  for (std::size_t g = 0; g < m; ++g) {
    for (ActorIndex v : snap.groups[g].members) {
      inc.push_back({v, static_cast<std::uint32_t>(g), 1.0});
    }
  }
  snap.incidence = SparseMatrix::fromTriplets(n, m, std::move(inc));

  // union of the per-group cliques; repeated pairs collapse to 1
  std::vector<std::uint64_t> pairs;
  for (const GroupKey& g : snap.groups) {
    const auto& mem = g.members;
    for (std::size_t i = 0; i < mem.size(); ++i) {
      for (std::size_t j = i + 1; j < mem.size(); ++j) {
        pairs.push_back((static_cast<std::uint64_t>(mem[i]) << 32) | mem[j]);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Triplet> adj;
  adj.reserve(pairs.size() * 2);
  for (std::uint64_t pq : pairs) {
    const auto p = static_cast<std::uint32_t>(pq >> 32);
    const auto q = static_cast<std::uint32_t>(pq & 0xffffffffu);
    adj.push_back({p, q, 1.0});
    adj.push_back({q, p, 1.0});
  }
  snap.adjacency = SparseMatrix::fromTriplets(n, n, std::move(adj));

  snap.vertexDegree = snap.incidence.rowSums();
  snap.edgeDegree = snap.incidence.colSums();
  return snap;
}

// Bijection between positions in a restricted matrix and global actor
// indices. toLocal holds -1 for actors outside the restriction.
struct IndexMap {
  std::vector<ActorIndex> toGlobal;
  std::vector<std::int64_t> toLocal;
};

struct RestrictedAdjacency {
  SparseMatrix outer;  // principal submatrix of A on V \ g
  IndexMap map;
};

inline RestrictedAdjacency restrictAdjacency(const NetworkSnapshot& snapshot,
                                             const GroupKey& excluded) {
  if (!excluded.members.empty() && excluded.members.back() >= snapshot.n) {
    throw std::invalid_argument("excluded group " + excluded.describe() +
                                " not within snapshot actors");
  }
  RestrictedAdjacency out;
  out.map.toLocal.assign(snapshot.n, -1);
  out.map.toGlobal.reserve(snapshot.n - excluded.size());
  for (std::uint32_t v = 0; v < snapshot.n; ++v) {
    if (!excluded.contains(v)) {
      out.map.toLocal[v] = static_cast<std::int64_t>(out.map.toGlobal.size());
      out.map.toGlobal.push_back(v);
    }
  }
  out.outer = snapshot.adjacency.principalSubmatrix(out.map.toGlobal);
  return out;
}

}  // namespace gacc
