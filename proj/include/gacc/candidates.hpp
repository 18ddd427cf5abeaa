#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gacc/corpus.hpp"
#include "gacc/scores.hpp"
#include "gacc/snapshot.hpp"

namespace gacc {

// Above this cardinality the 2^c - 2 subgroup enumeration is skipped.
inline constexpr std::size_t kDefaultSaEnumCap = 12;

// One possible future group: a training group (or a proper subgroup of one,
// identified by subgroupMask over its canonical member order) absorbing one
// external actor.
struct CandidateGroup {
  std::size_t baseGroup = 0;  // index into the training group list
  ActorIndex absorbedActor = 0;
  std::optional<std::uint32_t> subgroupMask;  // absent for IA
  GroupKey result;
  double score = 0.0;
};

// One candidate per external actor; score 0 where the scorer found no
// affinity. The candidate count is exactly n - c.
inline std::vector<CandidateGroup> enumerateIA(const NetworkSnapshot& snapshot,
                                               std::size_t groupIndex,
                                               const GroupActorScores& scores) {
  const GroupKey& group = snapshot.groups.at(groupIndex);
  std::vector<CandidateGroup> out;
  out.reserve(snapshot.n - group.size());
  for (std::uint32_t a = 0; a < snapshot.n; ++a) {
    if (group.contains(a)) continue;
    out.push_back({groupIndex, a, std::nullopt, group.with(a),
                   scores.scoreOf(a)});
  }
  return out;
}

// Every (proper non-empty subgroup, external actor) pair, all carrying the
// actor's group-level score. Groups above the enumeration cap yield nothing;
// callers are expected to warn.
inline std::vector<CandidateGroup> enumerateSA(
    const NetworkSnapshot& snapshot, std::size_t groupIndex,
    const GroupActorScores& scores,
    std::size_t maxSubgroupSize = kDefaultSaEnumCap) {
  const GroupKey& group = snapshot.groups.at(groupIndex);
  const std::size_t c = group.size();
  std::vector<CandidateGroup> out;
  // the ingest cap keeps c <= 20, so subgroup masks always fit 32 bits
  if (c < 2 || c > std::min(maxSubgroupSize, kMaxGroupSize)) return out;
  const std::uint32_t full = (1u << c) - 1;
  out.reserve((full - 1) * (snapshot.n - c));
  for (std::uint32_t a = 0; a < snapshot.n; ++a) {
    if (group.contains(a)) continue;
    const double score = scores.scoreOf(a);
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      std::vector<ActorIndex> members;
      members.reserve(static_cast<std::size_t>(std::popcount(mask)) + 1);
      for (std::size_t b = 0; b < c; ++b) {
        if (mask & (1u << b)) members.push_back(group.members[b]);
      }
      members.push_back(a);
      out.push_back({groupIndex, a, mask, GroupKey::of(std::move(members)),
                     score});
    }
  }
  return out;
}

struct RankedEntry {
  double score = 0.0;
  GroupKey result;
  CandidateGroup provenance;  // the best-scoring candidate forming result
};

struct RankedList {
  std::vector<RankedEntry> entries;  // score descending, ties by key ascending
  std::size_t cutoff = 0;            // the configured top-N
};

namespace detail {

inline bool rankedBefore(const RankedEntry& a, const RankedEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.result < b.result;
}

// deterministic winner among equal-scored candidates for the same key
inline bool provenanceBefore(const CandidateGroup& a, const CandidateGroup& b) {
  return std::tie(a.baseGroup, a.absorbedActor, a.subgroupMask) <
         std::tie(b.baseGroup, b.absorbedActor, b.subgroupMask);
}

}  // namespace detail

// Streaming dedup-by-max accumulator behind rankGlobal; feed candidates from
// any number of groups, in any order, then finish once.
class GlobalRanker {
 public:
  explicit GlobalRanker(std::size_t nTop) : nTop_(nTop) {}

  void add(const CandidateGroup& candidate) {
    auto [it, inserted] = best_.try_emplace(candidate.result, candidate);
    if (!inserted) {
      CandidateGroup& current = it->second;
      if (candidate.score > current.score ||
          (candidate.score == current.score &&
           detail::provenanceBefore(candidate, current))) {
        current = candidate;
      }
    }
  }

  void add(const std::vector<CandidateGroup>& candidates) {
    for (const CandidateGroup& c : candidates) add(c);
  }

  RankedList finish() const {
    RankedList list;
    list.cutoff = nTop_;
    list.entries.reserve(best_.size());
    for (const auto& [key, candidate] : best_) {
      list.entries.push_back({candidate.score, key, candidate});
    }
    std::sort(list.entries.begin(), list.entries.end(), detail::rankedBefore);
    if (list.entries.size() > nTop_) list.entries.resize(nTop_);
    return list;
  }

  std::size_t poolSize() const { return best_.size(); }

 private:
  std::size_t nTop_;
  std::unordered_map<GroupKey, CandidateGroup, GroupKeyHash> best_;
};

inline RankedList rankGlobal(const std::vector<CandidateGroup>& candidates,
                             std::size_t nTop) {
  GlobalRanker ranker(nTop);
  ranker.add(candidates);
  return ranker.finish();
}

// Top list for a single group; same ordering rule, no cross-group dedup
// (resulting keys are already unique within one group's pool).
inline RankedList rankPerGroup(const std::vector<CandidateGroup>& candidates,
                               std::size_t nTopPerGroup) {
  RankedList list;
  list.cutoff = nTopPerGroup;
  list.entries.reserve(candidates.size());
  for (const CandidateGroup& c : candidates) {
    list.entries.push_back({c.score, c.result, c});
  }
  std::sort(list.entries.begin(), list.entries.end(), detail::rankedBefore);
  if (list.entries.size() > nTopPerGroup) list.entries.resize(nTopPerGroup);
  return list;
}

enum class EvalMode { globalIA, globalSA, perGroupIA, perGroupSA };

// When a group produced no actual accretion events, its per-group recall term
// either contributes 0 to the average or the group is excluded from both
// numerator and denominator.
enum class ZeroDenominatorPolicy { countAsZero, excludeGroup };

struct EvalOptions {
  ZeroDenominatorPolicy zeroRecall = ZeroDenominatorPolicy::countAsZero;
  SaAbsorbPolicy saPolicy = SaAbsorbPolicy::outsideParentGroup;
};

struct PerGroupMetrics {
  std::size_t group = 0;
  std::size_t hits = 0;
  std::size_t actualEvents = 0;
  double precision = 0.0;
  std::optional<double> recall;
};

struct EvaluationReport {
  std::optional<double> precisionAtN;
  std::optional<double> recallAtN;
  std::optional<double> avgPrecision;
  std::optional<double> avgRecall;
  std::vector<PerGroupMetrics> perGroupDetail;
};

namespace detail {

inline std::size_t countHits(const RankedList& list,
                             const std::unordered_set<GroupKey, GroupKeyHash>&
                                 testSet) {
  std::size_t hits = 0;
  for (const RankedEntry& e : list.entries) {
    if (testSet.contains(e.result)) ++hits;
  }
  return hits;
}

}  // namespace detail

// Global precision/recall at the ranked list's cutoff. Recall divides by the
// number of test-period groups actually generated by the corresponding
// accretion process.
inline EvaluationReport evaluate(const RankedList& ranked,
                                 const std::vector<GroupKey>& trainGroups,
                                 const std::vector<GroupKey>& testGroups,
                                 EvalMode mode, const EvalOptions& options = {}) {
  if (mode != EvalMode::globalIA && mode != EvalMode::globalSA) {
    throw std::invalid_argument("per-group evaluation needs per-group lists");
  }
  const std::unordered_set<GroupKey, GroupKeyHash> testSet(testGroups.begin(),
                                                           testGroups.end());
  const AccretionEvents events =
      detectAccretionEvents(trainGroups, testGroups, options.saPolicy);
  const auto& flags = mode == EvalMode::globalIA
                          ? events.isIncrementalGroup
                          : events.isSubincrementalGroup;
  const std::size_t actual =
      static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));

  EvaluationReport report;
  const std::size_t hits = detail::countHits(ranked, testSet);
  report.precisionAtN = ranked.cutoff == 0
                            ? std::optional<double>{}
                            : static_cast<double>(hits) /
                                  static_cast<double>(ranked.cutoff);
  if (actual > 0) {
    report.recallAtN =
        static_cast<double>(hits) / static_cast<double>(actual);
  }
  return report;
}

// Per-group averages divide by the full training-set size. perGroupLists must
// be index-aligned with trainGroups; groups without a list (e.g. skipped SA
// enumerations) get empty lists.
inline EvaluationReport evaluate(const std::vector<RankedList>& perGroupLists,
                                 std::size_t nTopPerGroup,
                                 const std::vector<GroupKey>& trainGroups,
                                 const std::vector<GroupKey>& testGroups,
                                 EvalMode mode, const EvalOptions& options = {}) {
  if (mode != EvalMode::perGroupIA && mode != EvalMode::perGroupSA) {
    throw std::invalid_argument("global evaluation takes one ranked list");
  }
  if (perGroupLists.size() != trainGroups.size()) {
    throw std::invalid_argument("per-group lists misaligned with train set");
  }
  if (nTopPerGroup == 0) {
    throw std::invalid_argument("nTopPerGroup must be positive");
  }
  const std::unordered_set<GroupKey, GroupKeyHash> testSet(testGroups.begin(),
                                                           testGroups.end());
  const AccretionEvents events =
      detectAccretionEvents(trainGroups, testGroups, options.saPolicy);
  const auto& byGroup = mode == EvalMode::perGroupIA ? events.igByTrainGroup
                                                     : events.sgByTrainGroup;

  EvaluationReport report;
  report.perGroupDetail.reserve(trainGroups.size());
  double precisionSum = 0.0;
  double recallSum = 0.0;
  std::size_t recallGroups = 0;
  for (std::size_t i = 0; i < trainGroups.size(); ++i) {
    PerGroupMetrics m;
    m.group = i;
    m.hits = detail::countHits(perGroupLists[i], testSet);
    m.actualEvents = byGroup[i].size();
    m.precision = static_cast<double>(m.hits) /
                  static_cast<double>(nTopPerGroup);
    if (m.actualEvents > 0) {
      m.recall = static_cast<double>(m.hits) /
                 static_cast<double>(m.actualEvents);
      recallSum += *m.recall;
      ++recallGroups;
    }
    precisionSum += m.precision;
    report.perGroupDetail.push_back(std::move(m));
  }
  const auto total = static_cast<double>(trainGroups.size());
  if (!trainGroups.empty()) {
    report.avgPrecision = precisionSum / total;
    if (options.zeroRecall == ZeroDenominatorPolicy::countAsZero) {
      report.avgRecall = recallSum / total;
    } else if (recallGroups > 0) {
      report.avgRecall = recallSum / static_cast<double>(recallGroups);
    }
  }
  return report;
}

}  // namespace gacc
