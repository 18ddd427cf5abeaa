#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gacc/snapshot.hpp"

namespace gacc {

// Genuinely collaborative records larger than this are outside the small-group
// scope and are dropped at ingest with a warning.
inline constexpr std::size_t kMaxGroupSize = 20;

struct GroupRecord {
  int year = 0;
  GroupKey members;

  bool operator==(const GroupRecord&) const = default;
  auto operator<=>(const GroupRecord&) const = default;
};

struct SplitSpec {
  int trainStart = 0;
  int trainEnd = 0;
  int testStart = 0;
  int testEnd = 0;

  void validate() const {
    if (!(trainStart <= trainEnd && trainEnd < testStart &&
          testStart <= testEnd)) {
      throw std::invalid_argument("invalid split years: train [" +
                                  std::to_string(trainStart) + "," +
                                  std::to_string(trainEnd) + "], test [" +
                                  std::to_string(testStart) + "," +
                                  std::to_string(testEnd) + "]");
    }
  }

  bool operator==(const SplitSpec&) const = default;
};

// Named presets: the nine fixed-boundary splits plus the main split, and the
// 2004-07 training variant of the main split.
inline std::optional<SplitSpec> splitPreset(const std::string& name) {
  static const std::unordered_map<std::string, SplitSpec> presets = {
      {"A.1", {1992, 1995, 1996, 1998}}, {"A.2", {1993, 1995, 1996, 1998}},
      {"A.3", {1993, 1995, 1996, 1999}}, {"A.4", {1997, 2000, 2001, 2003}},
      {"A.5", {1998, 2000, 2001, 2003}}, {"A.6", {1998, 2000, 2001, 2004}},
      {"A.7", {2002, 2005, 2006, 2008}}, {"A.8", {2003, 2005, 2006, 2008}},
      {"A.9", {2003, 2005, 2006, 2009}}, {"main", {2003, 2007, 2008, 2010}},
      {"main-2004", {2004, 2007, 2008, 2010}}};
  const auto it = presets.find(name);
  if (it == presets.end()) return std::nullopt;
  return it->second;
}

namespace detail {

inline std::string trimCopy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

// Timestamped collaboration records plus the actor-name registry. Actor
// indices are assigned in first-appearance order; records are kept sorted by
// (year, members).
class CollaborationCorpus {
 public:
  static CollaborationCorpus ingest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open corpus file: " + path.string());
    }
    CollaborationCorpus corpus;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
      ++lineNo;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string trimmed = detail::trimCopy(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      corpus.addLine(line, path.string(), lineNo);
    }
    if (corpus.records_.empty()) {
      throw std::runtime_error("corpus file has no records: " + path.string());
    }
    corpus.finalize();
    return corpus;
  }

  static CollaborationCorpus fromRecords(
      const std::vector<std::pair<int, std::vector<std::string>>>& raw) {
    CollaborationCorpus corpus;
    for (const auto& [year, names] : raw) {
      corpus.addRecord(year, names, "<memory>", 0);
    }
    if (corpus.records_.empty()) {
      throw std::runtime_error("no records given");
    }
    corpus.finalize();
    return corpus;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error("cannot write corpus file: " + path.string());
    }
    for (const GroupRecord& r : records_) {
      out << r.year << '\t';
      for (std::size_t i = 0; i < r.members.size(); ++i) {
        if (i) out << ',';
        out << actorNames_[r.members.members[i]];
      }
      out << '\n';
    }
    if (!out) {
      throw std::runtime_error("write failed: " + path.string());
    }
  }

  std::size_t actorCount() const { return actorNames_.size(); }
  const std::vector<std::string>& actorNames() const { return actorNames_; }
  const std::string& actorName(ActorIndex a) const { return actorNames_.at(a); }
  const std::vector<GroupRecord>& records() const { return records_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::optional<ActorIndex> findActor(const std::string& name) const {
    const auto it = actorIds_.find(name);
    if (it == actorIds_.end()) return std::nullopt;
    return it->second;
  }

  // Equality is by content: same records up to renaming-stable form, i.e.
  // identical (year, member-name-set) record lists. Index assignment order is
  // deliberately not part of the identity.
  bool operator==(const CollaborationCorpus& other) const {
    return normalized() == other.normalized();
  }

 private:
  std::vector<std::string> actorNames_;
  std::unordered_map<std::string, ActorIndex> actorIds_;
  std::vector<GroupRecord> records_;
  std::vector<std::string> warnings_;

  void addLine(const std::string& line, const std::string& file,
               std::size_t lineNo) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(file + ":" + std::to_string(lineNo) +
                               ": expected <year>\\t<name>(,<name>)*");
    }
    const std::string yearText = detail::trimCopy(line.substr(0, tab));
    int year = 0;
    try {
      std::size_t used = 0;
      year = std::stoi(yearText, &used);
      if (used != yearText.size()) throw std::invalid_argument(yearText);
    } catch (const std::exception&) {
      throw std::runtime_error(file + ":" + std::to_string(lineNo) +
                               ": bad year '" + yearText + "'");
    }
    std::vector<std::string> names;
    std::stringstream rest(line.substr(tab + 1));
    std::string field;
    while (std::getline(rest, field, ',')) {
      names.push_back(detail::trimCopy(field));
    }
    if (names.empty()) {
      throw std::runtime_error(file + ":" + std::to_string(lineNo) +
                               ": record has no members");
    }
    for (const std::string& n : names) {
      if (n.empty()) {
        throw std::runtime_error(file + ":" + std::to_string(lineNo) +
                                 ": empty actor name");
      }
    }
    addRecord(year, names, file, lineNo);
  }

  void addRecord(int year, const std::vector<std::string>& names,
                 const std::string& file, std::size_t lineNo) {
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.empty()) throw std::runtime_error("record has no members");
    for (const std::string& n : unique) {
      if (n.empty() || n.find('\t') != std::string::npos ||
          n.find(',') != std::string::npos) {
        throw std::runtime_error(file + ":" + std::to_string(lineNo) +
                                 ": invalid actor name '" + n + "'");
      }
    }
    if (unique.size() > kMaxGroupSize) {
      warnings_.push_back(file + ":" + std::to_string(lineNo) + ": dropped " +
                          std::to_string(unique.size()) +
                          "-member record (small-group cap is " +
                          std::to_string(kMaxGroupSize) + ")");
      return;
    }
    std::vector<ActorIndex> members;
    members.reserve(unique.size());
    for (const std::string& n : names) {  // registry in appearance order
      if (!actorIds_.contains(n)) {
        actorIds_.emplace(n, static_cast<ActorIndex>(actorNames_.size()));
        actorNames_.push_back(n);
      }
    }
    for (const std::string& n : unique) {
      members.push_back(actorIds_.at(n));
    }
    records_.push_back({year, GroupKey::of(std::move(members))});
  }

  void finalize() { std::sort(records_.begin(), records_.end()); }

  std::vector<std::pair<int, std::vector<std::string>>> normalized() const {
    std::vector<std::pair<int, std::vector<std::string>>> out;
    out.reserve(records_.size());
    for (const GroupRecord& r : records_) {
      std::vector<std::string> names;
      names.reserve(r.members.size());
      for (ActorIndex a : r.members.members) names.push_back(actorNames_[a]);
      std::sort(names.begin(), names.end());
      out.emplace_back(r.year, std::move(names));
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct Split {
  std::vector<GroupKey> train;  // deduplicated, ascending
  std::vector<GroupKey> test;
};

inline Split makeSplit(const CollaborationCorpus& corpus,
                       const SplitSpec& spec) {
  spec.validate();
  Split split;
  for (const GroupRecord& r : corpus.records()) {
    if (r.year >= spec.trainStart && r.year <= spec.trainEnd) {
      split.train.push_back(r.members);
    } else if (r.year >= spec.testStart && r.year <= spec.testEnd) {
      split.test.push_back(r.members);
    }
  }
  auto dedup = [](std::vector<GroupKey>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedup(split.train);
  dedup(split.test);
  return split;
}

struct TestGroupTag {
  bool oldActorGroup = false;  // all members observed in training
  bool oldGroup = false;       // exact member set observed in training
};

inline std::vector<TestGroupTag> classifyTestGroups(
    const std::vector<GroupKey>& trainGroups,
    const std::vector<GroupKey>& testGroups) {
  std::unordered_set<GroupKey, GroupKeyHash> trainSet(trainGroups.begin(),
                                                      trainGroups.end());
  std::unordered_set<ActorIndex> oldActors;
  for (const GroupKey& g : trainGroups) {
    oldActors.insert(g.members.begin(), g.members.end());
  }
  std::vector<TestGroupTag> tags(testGroups.size());
  for (std::size_t i = 0; i < testGroups.size(); ++i) {
    tags[i].oldActorGroup =
        std::all_of(testGroups[i].members.begin(), testGroups[i].members.end(),
                    [&](ActorIndex a) { return oldActors.contains(a); });
    tags[i].oldGroup = trainSet.contains(testGroups[i]);
  }
  return tags;
}

// Whether a subgroup-accretion event requires the absorbed actor to sit
// outside the full parent group, or merely outside the chosen subgroup.
enum class SaAbsorbPolicy { outsideParentGroup, outsideSubgroupOnly };

// Test-period accretion events, attributed back to the training groups that
// can generate them. Only old-actor test groups qualify.
struct AccretionEvents {
  std::vector<bool> isIncrementalGroup;     // per test group
  std::vector<bool> isSubincrementalGroup;  // per test group
  // indices of distinct test groups reachable from each training group
  std::vector<std::vector<std::uint32_t>> igByTrainGroup;
  std::vector<std::vector<std::uint32_t>> sgByTrainGroup;
};

inline AccretionEvents detectAccretionEvents(
    const std::vector<GroupKey>& trainGroups,
    const std::vector<GroupKey>& testGroups,
    SaAbsorbPolicy policy = SaAbsorbPolicy::outsideParentGroup) {
  AccretionEvents ev;
  ev.isIncrementalGroup.assign(testGroups.size(), false);
  ev.isSubincrementalGroup.assign(testGroups.size(), false);
  ev.igByTrainGroup.assign(trainGroups.size(), {});
  ev.sgByTrainGroup.assign(trainGroups.size(), {});

  std::unordered_map<GroupKey, std::size_t, GroupKeyHash> trainIndex;
  for (std::size_t i = 0; i < trainGroups.size(); ++i) {
    trainIndex.emplace(trainGroups[i], i);
  }
  std::unordered_map<ActorIndex, std::vector<std::uint32_t>> groupsOfActor;
  for (std::size_t i = 0; i < trainGroups.size(); ++i) {
    for (ActorIndex a : trainGroups[i].members) {
      groupsOfActor[a].push_back(static_cast<std::uint32_t>(i));
    }
  }
  const std::vector<TestGroupTag> tags =
      classifyTestGroups(trainGroups, testGroups);

  // training groups strictly containing every member of s
  auto properSupergroups = [&](const GroupKey& s) {
    std::vector<std::uint32_t> current;
    bool first = true;
    for (ActorIndex a : s.members) {
      const auto it = groupsOfActor.find(a);
      if (it == groupsOfActor.end()) return std::vector<std::uint32_t>{};
      if (first) {
        current = it->second;
        first = false;
      } else {
        std::vector<std::uint32_t> merged;
        std::set_intersection(current.begin(), current.end(),
                              it->second.begin(), it->second.end(),
                              std::back_inserter(merged));
        current = std::move(merged);
      }
      if (current.empty()) return current;
    }
    std::erase_if(current, [&](std::uint32_t g) {
      return trainGroups[g].size() <= s.size();
    });
    return current;
  };

  for (std::size_t ti = 0; ti < testGroups.size(); ++ti) {
    if (!tags[ti].oldActorGroup || testGroups[ti].size() < 2) continue;
    const GroupKey& t = testGroups[ti];
    for (ActorIndex absorbed : t.members) {
      const GroupKey remainder = t.without(absorbed);
      if (const auto it = trainIndex.find(remainder); it != trainIndex.end()) {
        ev.isIncrementalGroup[ti] = true;
        ev.igByTrainGroup[it->second].push_back(
            static_cast<std::uint32_t>(ti));
      }
      for (std::uint32_t g : properSupergroups(remainder)) {
        if (policy == SaAbsorbPolicy::outsideParentGroup &&
            trainGroups[g].contains(absorbed)) {
          continue;
        }
        ev.isSubincrementalGroup[ti] = true;
        ev.sgByTrainGroup[g].push_back(static_cast<std::uint32_t>(ti));
      }
    }
  }
  for (auto& v : ev.igByTrainGroup) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : ev.sgByTrainGroup) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return ev;
}

// One family of incremental-statistics counts: either the IG or the SG side.
struct AccretionFamily {
  std::size_t oldCount = 0;
  std::size_t newCount = 0;
  std::size_t total = 0;
  std::optional<double> pctNewOfOag;    // 100 * new / OAG
  std::optional<double> pctOldOfOag;
  std::optional<double> pctTotalOfOag;
  std::optional<double> pctNewOfTotal;  // 100 * new / total accretion groups
  std::optional<double> pctOldOfTotal;
};

struct AccretionStats {
  std::size_t newActorGroups = 0;
  std::size_t oldActorGroups = 0;
  std::size_t totalGroups = 0;
  std::optional<double> pctNew;
  std::optional<double> pctOld;
  AccretionFamily ig;
  AccretionFamily sg;

  static std::optional<double> percent(std::size_t part, std::size_t whole) {
    if (whole == 0) return std::nullopt;
    return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
  }

  // Assembles all percentages from raw counts; the statistics arithmetic is
  // checked against the published A.1 row through this path.
  static AccretionStats fromCounts(std::size_t nag, std::size_t oag,
                                   std::size_t oldIgs, std::size_t newIgs,
                                   std::size_t oldSgs, std::size_t newSgs) {
    AccretionStats s;
    s.newActorGroups = nag;
    s.oldActorGroups = oag;
    s.totalGroups = nag + oag;
    s.pctNew = percent(nag, s.totalGroups);
    s.pctOld = percent(oag, s.totalGroups);
    auto family = [&](std::size_t oldCount, std::size_t newCount) {
      AccretionFamily f;
      f.oldCount = oldCount;
      f.newCount = newCount;
      f.total = oldCount + newCount;
      f.pctNewOfOag = percent(newCount, oag);
      f.pctOldOfOag = percent(oldCount, oag);
      f.pctTotalOfOag = percent(f.total, oag);
      f.pctNewOfTotal = percent(newCount, f.total);
      f.pctOldOfTotal = percent(oldCount, f.total);
      return f;
    };
    s.ig = family(oldIgs, newIgs);
    s.sg = family(oldSgs, newSgs);
    return s;
  }
};

inline AccretionStats computeAccretionStats(
    const std::vector<GroupKey>& trainGroups,
    const std::vector<GroupKey>& testGroups,
    SaAbsorbPolicy policy = SaAbsorbPolicy::outsideParentGroup) {
  const auto tags = classifyTestGroups(trainGroups, testGroups);
  const auto events = detectAccretionEvents(trainGroups, testGroups, policy);
  std::size_t nag = 0, oag = 0;
  std::size_t oldIgs = 0, newIgs = 0, oldSgs = 0, newSgs = 0;
  for (std::size_t i = 0; i < testGroups.size(); ++i) {
    if (tags[i].oldActorGroup) {
      ++oag;
    } else {
      ++nag;
    }
    if (events.isIncrementalGroup[i]) {
      (tags[i].oldGroup ? oldIgs : newIgs) += 1;
    }
    if (events.isSubincrementalGroup[i]) {
      (tags[i].oldGroup ? oldSgs : newSgs) += 1;
    }
  }
  return AccretionStats::fromCounts(nag, oag, oldIgs, newIgs, oldSgs, newSgs);
}

// Two-decimal reporting precision, rounding halves away from zero.
inline double roundPercent(double value) {
  const double scaled = value * 100.0;
  return (scaled < 0.0 ? -std::floor(-scaled + 0.5) : std::floor(scaled + 0.5)) /
         100.0;
}

}  // namespace gacc
