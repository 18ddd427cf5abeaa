#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gacc/birw.hpp"
#include "gacc/candidates.hpp"
#include "gacc/corpus.hpp"
#include "gacc/gks.hpp"
#include "gacc/glps.hpp"
#include "gacc/oracles.hpp"
#include "gacc/parallel.hpp"
#include "gacc/scores.hpp"
#include "gacc/snapshot.hpp"

namespace gacc {

enum class Method { gks, brws, glps };
enum class RunMode { ia, sa, both };

inline std::string methodName(Method m) {
  switch (m) {
    case Method::gks: return "gks";
    case Method::brws: return "brws";
    case Method::glps: return "glps";
  }
  return "?";
}

inline Method parseMethod(const std::string& name) {
  if (name == "gks") return Method::gks;
  if (name == "brws") return Method::brws;
  if (name == "glps") return Method::glps;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected gks, brws, glps or all)");
}

// "<preset>" or "<trainStart>-<trainEnd>:<testStart>-<testEnd>"
inline SplitSpec parseSplit(const std::string& text) {
  if (auto preset = splitPreset(text)) return *preset;
  int a = 0, b = 0, c = 0, d = 0;
  char sep1 = 0, sep2 = 0, sep3 = 0;
  std::istringstream in(text);
  if (in >> a >> sep1 >> b >> sep2 >> c >> sep3 >> d && sep1 == '-' &&
      sep2 == ':' && sep3 == '-' && in.eof()) {
    SplitSpec spec{a, b, c, d};
    spec.validate();
    return spec;
  }
  throw std::invalid_argument(
      "unknown split '" + text +
      "' (expected a preset like main or A.1, or YYYY-YYYY:YYYY-YYYY)");
}

struct RunConfig {
  std::filesystem::path corpusPath;
  std::vector<std::string> splits{"main"};  // stats may take several
  std::vector<Method> methods{Method::gks, Method::brws, Method::glps};
  RunMode mode = RunMode::both;
  double beta = 0.5;
  std::size_t maxLength = 4;
  double alpha = 0.6;
  std::size_t lGroup = 4;
  std::size_t lOuter = 4;
  std::optional<double> mu;  // unset: 0.1 for global lists, 0.5 per group
  double tol = 1e-8;
  std::size_t nTop = 10000;
  std::size_t nTopPerGroup = 100;
  // set when the user passed the flags; evaluate then overrides the cutoffs
  // recorded in ranked-list headers
  bool nTopExplicit = false;
  bool nTopPerGroupExplicit = false;
  std::size_t saEnumCap = kDefaultSaEnumCap;
  std::size_t threads = defaultThreadCount();
  std::uint64_t seed = 0;  // reserved; every run is deterministic
  bool perGroup = false;
  BirwNormalization birwNorm = BirwNormalization::grandTotal;
  SaAbsorbPolicy saPolicy = SaAbsorbPolicy::outsideParentGroup;
  ZeroDenominatorPolicy zeroRecall = ZeroDenominatorPolicy::countAsZero;
  std::filesystem::path outputDir = "out";
  bool mutate = false;  // verify-only fault injection for negative controls

  double muGlobal() const { return mu.value_or(0.1); }
  double muPerGroup() const { return mu.value_or(0.5); }

  SplitSpec splitSpec() const {
    if (splits.empty()) throw std::invalid_argument("no split configured");
    return parseSplit(splits.front());
  }
};

// Training-period actor universe: the snapshot is built over actors observed
// in at least one training group, compacted to dense indices. Only these
// actors can be absorbed, so candidate groups never contain actors unseen in
// training.
struct TrainingView {
  NetworkSnapshot snapshot;              // local indices
  std::vector<ActorIndex> toGlobal;      // local -> corpus registry index
  std::vector<std::int64_t> toLocal;     // registry -> local, -1 when unseen
  std::vector<GroupKey> testLocal;       // old-actor test groups, local indices
  std::vector<GroupKey> testGlobal;      // all test groups, registry indices
  std::size_t trainRecordGroups = 0;     // unique training groups
};

inline TrainingView buildTrainingView(const CollaborationCorpus& corpus,
                                      const Split& split) {
  TrainingView view;
  view.toLocal.assign(corpus.actorCount(), -1);
  for (const GroupKey& g : split.train) {
    for (ActorIndex a : g.members) view.toLocal[a] = 0;
  }
  for (std::size_t a = 0; a < corpus.actorCount(); ++a) {
    if (view.toLocal[a] == 0) {
      view.toLocal[a] = static_cast<std::int64_t>(view.toGlobal.size());
      view.toGlobal.push_back(static_cast<ActorIndex>(a));
    } else {
      view.toLocal[a] = -1;
    }
  }
  auto localize = [&](const GroupKey& g) {
    std::vector<ActorIndex> members;
    members.reserve(g.size());
    for (ActorIndex a : g.members) {
      members.push_back(static_cast<ActorIndex>(view.toLocal[a]));
    }
    return GroupKey{std::move(members)};  // monotone map keeps order
  };
  std::vector<GroupKey> trainLocal;
  trainLocal.reserve(split.train.size());
  for (const GroupKey& g : split.train) trainLocal.push_back(localize(g));
  view.snapshot = buildSnapshot(std::move(trainLocal), view.toGlobal.size());
  view.trainRecordGroups = split.train.size();
  view.testGlobal = split.test;
  for (const GroupKey& t : split.test) {
    const bool allSeen =
        std::all_of(t.members.begin(), t.members.end(),
                    [&](ActorIndex a) { return view.toLocal[a] >= 0; });
    if (allSeen) view.testLocal.push_back(localize(t));
  }
  std::sort(view.testLocal.begin(), view.testLocal.end());
  return view;
}

// Per-method scoring state shared across groups of one run.
class MethodScorer {
 public:
  MethodScorer(Method method, const NetworkSnapshot& snapshot,
               const RunConfig& config, double mu)
      : method_(method), snapshot_(snapshot) {
    switch (method) {
      case Method::gks:
        katz_ = computeKatz(snapshot, {config.beta, config.maxLength});
        break;
      case Method::brws:
        birwParams_ = BirwParams{config.alpha, config.lGroup, config.lOuter,
                                 config.birwNorm};
        birwParams_.validate();
        break;
      case Method::glps: {
        glpsParams_.mu = mu;
        glpsParams_.tol = config.tol;
        glpsParams_.maxIter = 100000;
        glpsParams_.validate();
        theta_ = buildPropagationOperator(snapshot);
        propagator_.emplace(theta_, glpsParams_);
        break;
      }
    }
  }

  // propagator_ refers into theta_, so instances must stay where constructed
  MethodScorer(const MethodScorer&) = delete;
  MethodScorer& operator=(const MethodScorer&) = delete;

  GroupActorScores scoreGroup(std::size_t groupIndex) const {
    const GroupKey& group = snapshot_.groups.at(groupIndex);
    switch (method_) {
      case Method::gks:
        return scoreGroupGKS(snapshot_, katz_, group);
      case Method::brws: {
        auto problem = buildAlignmentProblem(snapshot_, group);
        auto result = birwSeq(problem, birwParams_);
        return scoreGroupBRWS(result, problem);
      }
      case Method::glps: {
        auto f = propagator_->solve(group);
        return scoreGroupGLPS(f, group);
      }
    }
    throw std::logic_error("unreachable");
  }

  const KatzMatrix& katz() const { return katz_; }
  const PropagationOperator& theta() const { return theta_; }

 private:
  Method method_;
  const NetworkSnapshot& snapshot_;
  KatzMatrix katz_;
  BirwParams birwParams_;
  GlpsParams glpsParams_;
  PropagationOperator theta_;
  std::optional<LabelPropagator> propagator_;
};

namespace detail {

inline std::string formatDouble(double v, const char* fmt = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

inline std::string formatPercent(const std::optional<double>& v) {
  if (!v.has_value()) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", roundPercent(*v));
  return buf;
}

inline std::string formatMetric(const std::optional<double>& v) {
  return v.has_value() ? formatDouble(*v, "%.10g") : "NA";
}

}  // namespace detail

// The comment block prepended to every output file: the resolved
// configuration, written deterministically.
class ConfigEcho {
 public:
  explicit ConfigEcho(std::string command) {
    add("command", std::move(command));
  }
  void add(const std::string& key, std::string value) {
    lines_.emplace_back(key, std::move(value));
  }
  void add(const std::string& key, double value) {
    add(key, detail::formatDouble(value));
  }
  void add(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }
  void write(std::ostream& out) const {
    for (const auto& [k, v] : lines_) out << "# " << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

inline std::string splitText(const SplitSpec& s) {
  return std::to_string(s.trainStart) + "-" + std::to_string(s.trainEnd) +
         ":" + std::to_string(s.testStart) + "-" + std::to_string(s.testEnd);
}

// One scored run: everything cmdScore produces for a (method, mode) pair.
struct ScoredLists {
  RankedList global;
  std::vector<RankedList> perGroup;  // aligned with snapshot.groups; may be empty
  std::size_t skippedSaGroups = 0;
};

// Candidates with score zero are left out of ranked lists: the scorers store
// sparse score rows and the zero tail of the candidate space is never
// materialized at pipeline level.
inline ScoredLists scoreAndRank(const TrainingView& view,
                                const MethodScorer& scorer, bool saMode,
                                const RunConfig& config, bool wantPerGroup) {
  const auto& groups = view.snapshot.groups;
  ScoredLists out;
  std::vector<std::vector<CandidateGroup>> perGroupCandidates(groups.size());
  std::atomic<std::size_t> skipped{0};
  parallelFor(groups.size(), config.threads, [&](std::size_t g) {
    const GroupActorScores scores = scorer.scoreGroup(g);
    std::vector<CandidateGroup> candidates;
    if (!saMode) {
      candidates.reserve(scores.entries.size());
      for (const auto& [actor, score] : scores.entries) {
        candidates.push_back({g, actor, std::nullopt,
                              groups[g].with(actor), score});
      }
    } else {
      const std::size_t c = groups[g].size();
      if (c < 2) {
        // no proper subgroup pairs with an external actor
      } else if (c > std::min(config.saEnumCap, kMaxGroupSize)) {
        skipped.fetch_add(1);
      } else {
        const std::uint32_t full = (1u << c) - 1;
        candidates.reserve(scores.entries.size() * (full - 1));
        for (const auto& [actor, score] : scores.entries) {
          for (std::uint32_t mask = 1; mask < full; ++mask) {
            std::vector<ActorIndex> members;
            members.reserve(static_cast<std::size_t>(std::popcount(mask)) + 1);
            for (std::size_t b = 0; b < c; ++b) {
              if (mask & (1u << b)) members.push_back(groups[g].members[b]);
            }
            members.push_back(actor);
            candidates.push_back({g, actor, mask,
                                  GroupKey::of(std::move(members)), score});
          }
        }
      }
    }
    perGroupCandidates[g] = std::move(candidates);
  });
  out.skippedSaGroups = skipped.load();

  GlobalRanker ranker(config.nTop);
  for (const auto& candidates : perGroupCandidates) ranker.add(candidates);
  out.global = ranker.finish();
  if (wantPerGroup) {
    out.perGroup.resize(groups.size());
    parallelFor(groups.size(), config.threads, [&](std::size_t g) {
      out.perGroup[g] = rankPerGroup(perGroupCandidates[g],
                                     config.nTopPerGroup);
    });
  }
  return out;
}

// ---- file output ----

namespace detail {

inline std::string memberNames(const GroupKey& local,
                               const TrainingView& view,
                               const CollaborationCorpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (i) out += ',';
    out += corpus.actorName(view.toGlobal[local.members[i]]);
  }
  return out;
}

inline void writeRankedRows(std::ostream& os, const RankedList& list,
                            const TrainingView& view,
                            const CollaborationCorpus& corpus) {
  std::size_t rank = 0;
  for (const RankedEntry& e : list.entries) {
    ++rank;
    const CandidateGroup& p = e.provenance;
    const GroupKey& base = view.snapshot.groups[p.baseGroup];
    os << rank << '\t' << formatDouble(e.score) << '\t'
       << memberNames(e.result, view, corpus) << '\t'
       << memberNames(base, view, corpus) << '\t'
       << corpus.actorName(view.toGlobal[p.absorbedActor]) << '\t';
    if (p.subgroupMask.has_value()) {
      std::vector<ActorIndex> sub;
      for (std::size_t b = 0; b < base.size(); ++b) {
        if (*p.subgroupMask & (1u << b)) sub.push_back(base.members[b]);
      }
      os << memberNames(GroupKey{sub}, view, corpus);
    }
    os << '\n';
  }
}

inline std::ofstream openOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file: " + path.string());
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kGroupsPerShard = 10000;
inline constexpr const char* kRankedColumns =
    "rank\tscore\tmembers\tbase_group\tabsorbed_actor\tsubgroup";

struct ScoreFileSet {
  std::filesystem::path global;
  std::vector<std::filesystem::path> perGroupShards;
};

inline ScoreFileSet writeScoreOutputs(const TrainingView& view,
                                      const CollaborationCorpus& corpus,
                                      const ScoredLists& lists, Method method,
                                      bool saMode, const RunConfig& config,
                                      const SplitSpec& split) {
  const std::string modeName = saMode ? "sa" : "ia";
  auto echoFor = [&](const std::string& scope) {
    ConfigEcho echo("score");
    echo.add("corpus", config.corpusPath.filename().string());
    echo.add("split", splitText(split));
    echo.add("method", methodName(method));
    echo.add("mode", modeName);
    echo.add("scope", scope);
    switch (method) {
      case Method::gks:
        echo.add("beta", config.beta);
        echo.add("max_length", config.maxLength);
        break;
      case Method::brws:
        echo.add("alpha", config.alpha);
        echo.add("lg", config.lGroup);
        echo.add("lo", config.lOuter);
        echo.add("birw_norm",
                 config.birwNorm == BirwNormalization::grandTotal
                     ? "grand-total"
                     : "per-row");
        break;
      case Method::glps:
        echo.add("mu", scope == "global" ? config.muGlobal()
                                         : config.muPerGroup());
        echo.add("tol", config.tol);
        break;
    }
    echo.add("n_top", config.nTop);
    echo.add("n_top_group", config.nTopPerGroup);
    if (saMode) echo.add("sa_cap", config.saEnumCap);
    echo.add("zero_score_candidates", "omitted");
    return echo;
  };

  ScoreFileSet files;
  files.global = config.outputDir /
                 ("ranked_" + methodName(method) + "_" + modeName + ".tsv");
  {
    auto out = detail::openOutput(files.global);
    echoFor("global").write(out);
    out << "# columns: " << kRankedColumns << '\n';
    detail::writeRankedRows(out, lists.global, view, corpus);
  }
  if (!lists.perGroup.empty()) {
    const std::size_t shards =
        (lists.perGroup.size() + kGroupsPerShard - 1) / kGroupsPerShard;
    for (std::size_t shard = 0; shard < shards; ++shard) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_part%04zu.tsv", shard);
      auto path = config.outputDir / ("pergroup_" + methodName(method) + "_" +
                                      modeName + suffix);
      auto out = detail::openOutput(path);
      echoFor("per-group").write(out);
      out << "# columns: " << kRankedColumns << '\n';
      const std::size_t begin = shard * kGroupsPerShard;
      const std::size_t end =
          std::min(begin + kGroupsPerShard, lists.perGroup.size());
      for (std::size_t g = begin; g < end; ++g) {
        detail::writeRankedRows(out, lists.perGroup[g], view, corpus);
      }
      files.perGroupShards.push_back(std::move(path));
    }
  }
  return files;
}

// ---- stats command ----

inline void writeStatsRow(std::ostream& out, const std::string& splitName,
                          const SplitSpec& spec, const AccretionStats& s) {
  auto family = [&](const AccretionFamily& f) {
    out << '\t' << f.oldCount << '\t' << f.newCount << '\t' << f.total << '\t'
        << detail::formatPercent(f.pctNewOfOag) << '\t'
        << detail::formatPercent(f.pctOldOfOag) << '\t'
        << detail::formatPercent(f.pctTotalOfOag) << '\t'
        << detail::formatPercent(f.pctNewOfTotal) << '\t'
        << detail::formatPercent(f.pctOldOfTotal);
  };
  out << splitName << '\t' << splitText(spec) << '\t' << s.newActorGroups
      << '\t' << s.oldActorGroups << '\t' << s.totalGroups << '\t'
      << detail::formatPercent(s.pctNew) << '\t'
      << detail::formatPercent(s.pctOld);
  family(s.ig);
  family(s.sg);
  out << '\n';
}

inline std::filesystem::path runStats(const CollaborationCorpus& corpus,
                                      const RunConfig& config) {
  std::filesystem::create_directories(config.outputDir);
  auto path = config.outputDir / "stats.tsv";
  auto out = detail::openOutput(path);
  ConfigEcho echo("stats");
  echo.add("corpus", config.corpusPath.filename().string());
  echo.add("sa_absorb", config.saPolicy == SaAbsorbPolicy::outsideParentGroup
                            ? "outside-parent"
                            : "outside-subgroup");
  echo.write(out);
  out << "split\tyears\tnag\toag\ttotal_groups\tpct_new\tpct_old"
         "\told_igs\tnew_igs\ttotal_igs\tpct_oag_new_igs\tpct_oag_old_igs"
         "\tpct_oag_total_igs\tpct_igs_new\tpct_igs_old"
         "\told_sgs\tnew_sgs\ttotal_sgs\tpct_oag_new_sgs\tpct_oag_old_sgs"
         "\tpct_oag_total_sgs\tpct_sgs_new\tpct_sgs_old\n";
  for (const std::string& name : config.splits) {
    const SplitSpec spec = parseSplit(name);
    const Split split = makeSplit(corpus, spec);
    if (split.train.empty() || split.test.empty()) {
      std::cerr << "warning: split " << name << " has an empty "
                << (split.train.empty() ? "train" : "test") << " side\n";
    }
    const AccretionStats stats =
        computeAccretionStats(split.train, split.test, config.saPolicy);
    writeStatsRow(out, name, spec, stats);
  }
  return path;
}

// ---- score command ----

inline std::vector<ScoreFileSet> runScore(const CollaborationCorpus& corpus,
                                          const RunConfig& config) {
  std::filesystem::create_directories(config.outputDir);
  const SplitSpec spec = config.splitSpec();
  const Split split = makeSplit(corpus, spec);
  if (split.train.empty()) {
    std::cerr << "warning: empty training side; ranked lists will be empty\n";
  }
  const TrainingView view = buildTrainingView(corpus, split);
  std::vector<ScoreFileSet> written;
  for (Method method : config.methods) {
    std::optional<MethodScorer> globalScorer;
    globalScorer.emplace(method, view.snapshot, config, config.muGlobal());
    // per-group GLPS runs use their own default mu
    std::optional<MethodScorer> perGroupScorer;
    const bool distinctPerGroupScorer =
        config.perGroup && method == Method::glps &&
        config.muGlobal() != config.muPerGroup();
    if (distinctPerGroupScorer) {
      perGroupScorer.emplace(method, view.snapshot, config,
                             config.muPerGroup());
    }
    for (bool saMode : {false, true}) {
      if (saMode && config.mode == RunMode::ia) continue;
      if (!saMode && config.mode == RunMode::sa) continue;
      ScoredLists lists = scoreAndRank(view, *globalScorer, saMode, config,
                                       config.perGroup &&
                                           !distinctPerGroupScorer);
      if (distinctPerGroupScorer) {
        ScoredLists perGroupLists =
            scoreAndRank(view, *perGroupScorer, saMode, config, true);
        lists.perGroup = std::move(perGroupLists.perGroup);
        lists.skippedSaGroups =
            std::max(lists.skippedSaGroups, perGroupLists.skippedSaGroups);
      }
      if (lists.skippedSaGroups > 0) {
        std::cerr << "warning: skipped " << lists.skippedSaGroups
                  << " groups larger than sa-cap " << config.saEnumCap
                  << " during SA enumeration\n";
      }
      written.push_back(writeScoreOutputs(view, corpus, lists, method, saMode,
                                          config, spec));
    }
  }
  return written;
}

// ---- evaluate command ----

struct ParsedRankedFile {
  std::map<std::string, std::string> header;
  bool perGroupScope = false;
  bool saMode = false;
  std::size_t nTop = 0;
  std::size_t nTopPerGroup = 0;
  // candidate keys in corpus registry indices, with base-group provenance
  std::vector<std::pair<GroupKey, GroupKey>> rows;  // (result, baseGroup)
};

inline ParsedRankedFile readRankedList(const std::filesystem::path& path,
                                       const CollaborationCorpus& corpus) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open ranked list: " + path.string());
  }
  ParsedRankedFile parsed;
  std::string line;
  std::size_t lineNo = 0;
  auto fail = [&](const std::string& what) -> void {
    throw std::runtime_error(path.string() + ":" + std::to_string(lineNo) +
                             ": " + what);
  };
  auto toKey = [&](const std::string& names) {
    std::vector<ActorIndex> members;
    std::stringstream ss(names);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto actor = corpus.findActor(name);
      if (!actor.has_value()) fail("unknown actor '" + name + "'");
      members.push_back(*actor);
    }
    if (members.empty()) fail("empty member list");
    return GroupKey::of(std::move(members));
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) {
        parsed.header[line.substr(2, eq - 2)] = line.substr(eq + 3);
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 6) {
      fail("expected 6 tab-separated columns, got " +
           std::to_string(fields.size()));
    }
    try {
      (void)std::stoull(fields[0]);
      (void)std::stod(fields[1]);
    } catch (const std::exception&) {
      fail("bad rank or score field");
    }
    parsed.rows.emplace_back(toKey(fields[2]), toKey(fields[3]));
  }
  lineNo = 0;
  if (!parsed.header.contains("command") ||
      parsed.header.at("command") != "score") {
    throw std::runtime_error(path.string() +
                             ": not a ranked list produced by `gacc score`");
  }
  parsed.perGroupScope = parsed.header.contains("scope") &&
                         parsed.header.at("scope") == "per-group";
  parsed.saMode =
      parsed.header.contains("mode") && parsed.header.at("mode") == "sa";
  if (parsed.header.contains("n_top")) {
    parsed.nTop = std::stoull(parsed.header.at("n_top"));
  }
  if (parsed.header.contains("n_top_group")) {
    parsed.nTopPerGroup = std::stoull(parsed.header.at("n_top_group"));
  }
  return parsed;
}

struct EvaluationOutcome {
  std::map<std::string, std::optional<double>> metrics;  // key -> value
  std::filesystem::path reportPath;
};

inline EvaluationOutcome runEvaluate(
    const CollaborationCorpus& corpus, const RunConfig& config,
    const std::vector<std::filesystem::path>& rankedPaths) {
  if (rankedPaths.empty()) {
    throw std::invalid_argument("evaluate needs at least one ranked list");
  }
  const SplitSpec spec = config.splitSpec();
  const Split split = makeSplit(corpus, spec);
  EvalOptions options{config.zeroRecall, config.saPolicy};

  std::unordered_map<GroupKey, std::size_t, GroupKeyHash> trainIndex;
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    trainIndex.emplace(split.train[i], i);
  }

  EvaluationOutcome outcome;
  // shards of the same (scope, mode) merge into one evaluation input; mixing
  // methods in one report would be meaningless
  std::map<std::pair<bool, bool>, std::vector<ParsedRankedFile>> byKind;
  std::string method;
  for (const auto& path : rankedPaths) {
    ParsedRankedFile parsed = readRankedList(path, corpus);
    if (parsed.header.contains("method")) {
      const std::string& m = parsed.header.at("method");
      if (method.empty()) {
        method = m;
      } else if (method != m) {
        throw std::invalid_argument(
            "ranked lists from different methods given (" + method + " and " +
            m + "); evaluate one method per run");
      }
    }
    byKind[{parsed.perGroupScope, parsed.saMode}].push_back(std::move(parsed));
  }

  for (auto& [kind, files] : byKind) {
    const auto [perGroupScope, saMode] = kind;
    const EvalMode mode =
        perGroupScope ? (saMode ? EvalMode::perGroupSA : EvalMode::perGroupIA)
                      : (saMode ? EvalMode::globalSA : EvalMode::globalIA);
    if (!perGroupScope) {
      if (files.size() > 1) {
        throw std::invalid_argument(
            "multiple global ranked lists of the same mode given");
      }
      const ParsedRankedFile& f = files.front();
      const std::size_t nTop =
          config.nTopExplicit || f.nTop == 0 ? config.nTop : f.nTop;
      RankedList list;
      list.cutoff = nTop;
      for (const auto& [result, base] : f.rows) {
        list.entries.push_back({0.0, result, {}});
      }
      auto report = evaluate(list, split.train, split.test, mode, options);
      const std::string suffix = saMode ? "sa" : "ia";
      outcome.metrics["precision_at_N_" + suffix] = report.precisionAtN;
      outcome.metrics["recall_at_N_" + suffix] = report.recallAtN;
    } else {
      std::size_t nTopPerGroup = config.nTopPerGroup;
      if (!config.nTopPerGroupExplicit && files.front().nTopPerGroup != 0) {
        nTopPerGroup = files.front().nTopPerGroup;
      }
      std::vector<RankedList> lists(split.train.size());
      for (const ParsedRankedFile& f : files) {
        for (const auto& [result, base] : f.rows) {
          const auto it = trainIndex.find(base);
          if (it == trainIndex.end()) {
            throw std::runtime_error(
                "per-group ranked list references base group outside the "
                "training split");
          }
          lists[it->second].entries.push_back({0.0, result, {}});
        }
      }
      auto report =
          evaluate(lists, nTopPerGroup, split.train, split.test, mode, options);
      const std::string suffix = saMode ? "sa" : "ia";
      outcome.metrics["avg_precision_at_Ng_" + suffix] = report.avgPrecision;
      outcome.metrics["avg_recall_at_Ng_" + suffix] = report.avgRecall;
    }
  }

  std::filesystem::create_directories(config.outputDir);
  outcome.reportPath =
      config.outputDir /
      (method.empty() ? "report.txt" : "report_" + method + ".txt");
  auto out = detail::openOutput(outcome.reportPath);
  ConfigEcho echo("evaluate");
  echo.add("corpus", config.corpusPath.filename().string());
  echo.add("split", splitText(spec));
  std::string inputs;
  for (const auto& path : rankedPaths) {
    if (!inputs.empty()) inputs += ",";
    inputs += path.filename().string();
  }
  echo.add("inputs", inputs);
  echo.add("recall_zero_denominator",
           config.zeroRecall == ZeroDenominatorPolicy::countAsZero
               ? "count-as-zero"
               : "exclude-group");
  echo.write(out);
  static constexpr const char* kKeyOrder[] = {
      "precision_at_N_ia",      "recall_at_N_ia",
      "precision_at_N_sa",      "recall_at_N_sa",
      "avg_precision_at_Ng_ia", "avg_recall_at_Ng_ia",
      "avg_precision_at_Ng_sa", "avg_recall_at_Ng_sa"};
  for (const char* key : kKeyOrder) {
    const auto it = outcome.metrics.find(key);
    if (it != outcome.metrics.end()) {
      out << key << " = " << detail::formatMetric(it->second) << '\n';
    }
  }
  return outcome;
}

}  // namespace gacc
