#include "gacc/corpus.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "test_util.hpp"

namespace gacc {
namespace {

using gacc::testing::key;
using gacc::testing::TempDir;
using gacc::testing::writeFile;

TEST(Ingest, MinimalRecord) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv", "1996\ta,b,c\n");
  auto corpus = CollaborationCorpus::ingest(path);
  EXPECT_EQ(corpus.actorCount(), 3u);
  ASSERT_EQ(corpus.records().size(), 1u);
  EXPECT_EQ(corpus.records()[0].year, 1996);
  EXPECT_EQ(corpus.records()[0].members.size(), 3u);
}

TEST(Ingest, DuplicateLinesKeepBothRecords) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv", "1996\ta,b\n1996\ta,b\n");
  auto corpus = CollaborationCorpus::ingest(path);
  EXPECT_EQ(corpus.records().size(), 2u);
  auto split = makeSplit(corpus, {1996, 1996, 1997, 1997});
  EXPECT_EQ(split.train.size(), 1u);  // deduplicated per period
}

TEST(Ingest, CommentsAndBlankLinesSkipped) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv",
                        "# header comment\n\n1996\ta,b\n  \n# more\n");
  auto corpus = CollaborationCorpus::ingest(path);
  EXPECT_EQ(corpus.records().size(), 1u);
}

TEST(Ingest, NamesMayContainSpaces) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv", "2001\tAda Lovelace,Alan Turing\n");
  auto corpus = CollaborationCorpus::ingest(path);
  EXPECT_TRUE(corpus.findActor("Ada Lovelace").has_value());
  EXPECT_TRUE(corpus.findActor("Alan Turing").has_value());
}

TEST(Ingest, DuplicateNamesWithinRecordCollapse) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv", "1996\ta,b,a\n");
  auto corpus = CollaborationCorpus::ingest(path);
  EXPECT_EQ(corpus.records()[0].members.size(), 2u);
}

TEST(Ingest, MalformedLineReportsLineNumber) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv", "1996\ta,b\nnot-a-record\n");
  try {
    CollaborationCorpus::ingest(path);
    FAIL() << "expected parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(Ingest, BadYearAndEmptyNameRejected) {
  TempDir dir;
  EXPECT_THROW(
      CollaborationCorpus::ingest(writeFile(dir.path() / "a.tsv", "19x6\ta\n")),
      std::runtime_error);
  EXPECT_THROW(
      CollaborationCorpus::ingest(writeFile(dir.path() / "b.tsv", "1996\ta,,b\n")),
      std::runtime_error);
}

TEST(Ingest, EmptyFileRejected) {
  TempDir dir;
  EXPECT_THROW(
      CollaborationCorpus::ingest(writeFile(dir.path() / "e.tsv", "# only\n")),
      std::runtime_error);
}

TEST(Ingest, OversizedRecordsDroppedWithWarning) {
  std::string big = "2000\t";
  for (int i = 0; i < 21; ++i) {
    if (i) big += ",";
    big += "actor" + std::to_string(i);
  }
  big += "\n2000\ta,b\n";
  TempDir dir;
  auto corpus = CollaborationCorpus::ingest(writeFile(dir.path() / "c.tsv", big));
  EXPECT_EQ(corpus.records().size(), 1u);
  EXPECT_EQ(corpus.actorCount(), 2u);  // dropped record registers nobody
  ASSERT_EQ(corpus.warnings().size(), 1u);
  EXPECT_NE(corpus.warnings()[0].find("dropped"), std::string::npos);
}

TEST(Ingest, RoundTripPreservesCorpus) {
  TempDir dir;
  auto path = writeFile(dir.path() / "c.tsv",
                        "1997\tc b,a a\n1996\tz,y\n1997\tq\n1996\tz,y\n");
  auto corpus = CollaborationCorpus::ingest(path);
  corpus.write(dir.path() / "out.tsv");
  auto again = CollaborationCorpus::ingest(dir.path() / "out.tsv");
  EXPECT_TRUE(corpus == again);
}

TEST(SplitSpec, ValidatesOrdering) {
  EXPECT_THROW((SplitSpec{2000, 1999, 2001, 2002}.validate()),
               std::invalid_argument);
  EXPECT_THROW((SplitSpec{1999, 2000, 2000, 2001}.validate()),
               std::invalid_argument);
  EXPECT_NO_THROW((SplitSpec{1999, 2000, 2001, 2001}.validate()));
}

TEST(SplitPresets, TableRowsResolve) {
  auto main = splitPreset("main");
  ASSERT_TRUE(main.has_value());
  EXPECT_EQ(*main, (SplitSpec{2003, 2007, 2008, 2010}));
  auto a1 = splitPreset("A.1");
  ASSERT_TRUE(a1.has_value());
  EXPECT_EQ(*a1, (SplitSpec{1992, 1995, 1996, 1998}));
  EXPECT_TRUE(splitPreset("main-2004").has_value());
  EXPECT_FALSE(splitPreset("B.1").has_value());
}

TEST(MakeSplit, AllRecordsInTrainGivesEmptyTest) {
  auto corpus = CollaborationCorpus::fromRecords(
      {{1994, {"a", "b"}}, {1995, {"b", "c"}}});
  auto split = makeSplit(corpus, {1992, 1995, 1996, 1998});
  EXPECT_EQ(split.train.size(), 2u);
  EXPECT_TRUE(split.test.empty());
}

TEST(MakeSplit, PartitionsByYearBoundary) {
  auto corpus = CollaborationCorpus::fromRecords({{1992, {"a", "b"}},
                                                  {1995, {"b", "c"}},
                                                  {1996, {"c", "d"}},
                                                  {1998, {"d", "e"}},
                                                  {1999, {"e", "f"}}});
  auto split = makeSplit(corpus, *splitPreset("A.1"));
  EXPECT_EQ(split.train.size(), 2u);  // 1992, 1995
  EXPECT_EQ(split.test.size(), 2u);   // 1996, 1998; 1999 outside both
}

TEST(ClassifyTestGroups, TagsFollowMembership) {
  auto corpus = CollaborationCorpus::fromRecords({{1992, {"a", "b"}},
                                                  {1993, {"b", "c", "d"}},
                                                  {1996, {"a", "b"}},
                                                  {1996, {"a", "x"}},
                                                  {1997, {"a", "c"}}});
  auto split = makeSplit(corpus, {1992, 1995, 1996, 1998});
  auto tags = classifyTestGroups(split.train, split.test);
  ASSERT_EQ(tags.size(), 3u);
  // tags align with split.test order (ascending GroupKey)
  std::size_t oag = 0, old = 0;
  for (const auto& t : tags) {
    oag += t.oldActorGroup;
    old += t.oldGroup;
  }
  EXPECT_EQ(oag, 2u);  // {a,b} and {a,c}; {a,x} has the unseen x
  EXPECT_EQ(old, 1u);  // only {a,b} existed verbatim
}

TEST(ClassifyTestGroups, MatchesBruteForceOnMixedFixture) {
  auto train = std::vector<GroupKey>{key({0, 1}), key({1, 2, 3}), key({4, 5})};
  auto test = std::vector<GroupKey>{key({0, 1}),    key({0, 2}),
                                    key({1, 2, 3}), key({0, 6}),
                                    key({4, 5, 6}), key({3, 4})};
  auto tags = classifyTestGroups(train, test);
  std::set<ActorIndex> oldActors;
  for (const auto& g : train) {
    oldActors.insert(g.members.begin(), g.members.end());
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    bool allOld = true;
    for (ActorIndex a : test[i].members) allOld &= oldActors.contains(a);
    EXPECT_EQ(tags[i].oldActorGroup, allOld);
    EXPECT_EQ(tags[i].oldGroup,
              std::find(train.begin(), train.end(), test[i]) != train.end());
  }
}

// brute-force IG/SG oracle: enumerate all training groups and all of their
// proper subgroups explicitly
struct BruteForceEvents {
  bool ig = false;
  bool sg = false;
};

BruteForceEvents bruteForceDetect(const std::vector<GroupKey>& train,
                                  const GroupKey& t, SaAbsorbPolicy policy) {
  BruteForceEvents out;
  std::set<ActorIndex> oldActors;
  for (const auto& g : train) oldActors.insert(g.members.begin(), g.members.end());
  for (ActorIndex a : t.members) {
    if (!oldActors.contains(a)) return out;  // NAG: never an IG/SG
  }
  for (const GroupKey& g : train) {
    if (g.size() + 1 == t.size() && g.isSubsetOf(t)) out.ig = true;
    const std::size_t c = g.size();
    if (c < 2 || c > 20) continue;
    for (std::uint32_t mask = 1; mask + 1 < (1u << c); ++mask) {
      std::vector<ActorIndex> sub;
      for (std::size_t b = 0; b < c; ++b) {
        if (mask & (1u << b)) sub.push_back(g.members[b]);
      }
      GroupKey s = GroupKey::of(sub);
      if (s.size() + 1 != t.size() || !s.isSubsetOf(t)) continue;
      ActorIndex absorbed = 0;
      for (ActorIndex a : t.members) {
        if (!s.contains(a)) absorbed = a;
      }
      if (policy == SaAbsorbPolicy::outsideParentGroup && g.contains(absorbed)) {
        continue;
      }
      out.sg = true;
    }
  }
  return out;
}

TEST(DetectAccretionEvents, MatchesBruteForceSubsetOracle) {
  auto train = std::vector<GroupKey>{key({0, 1}), key({1, 2, 3}),
                                     key({2, 3, 4}), key({5, 6}),
                                     key({0, 1, 2, 3})};
  auto test = std::vector<GroupKey>{key({0, 1, 4}),          // IG? no; SG: {0,1}+4
                                    key({0, 1, 2}),          // SG via {0,1}+2? 2 in parent {0,1,2,3}
                                    key({1, 2, 3, 5}),       // IG {1,2,3}+5, SG too
                                    key({0, 1, 2, 3, 4}),    // IG {0,1,2,3}+4
                                    key({5, 6, 7}),          // NAG if 7 unseen
                                    key({0, 5})};            // neither
  for (auto policy : {SaAbsorbPolicy::outsideParentGroup,
                      SaAbsorbPolicy::outsideSubgroupOnly}) {
    auto events = detectAccretionEvents(train, test, policy);
    for (std::size_t i = 0; i < test.size(); ++i) {
      auto expected = bruteForceDetect(train, test[i], policy);
      EXPECT_EQ(events.isIncrementalGroup[i], expected.ig) << i;
      EXPECT_EQ(events.isSubincrementalGroup[i], expected.sg) << i;
    }
  }
}

TEST(DetectAccretionEvents, AbsorbPolicyChangesBorderlineCase) {
  // {0,1,2} test group: subgroup {0,1} of parent {0,1,2,3} absorbing 2, which
  // is inside the parent
  auto train = std::vector<GroupKey>{key({0, 1, 2, 3})};
  auto test = std::vector<GroupKey>{key({0, 1, 2})};
  auto strict = detectAccretionEvents(train, test,
                                      SaAbsorbPolicy::outsideParentGroup);
  EXPECT_FALSE(strict.isSubincrementalGroup[0]);
  auto loose = detectAccretionEvents(train, test,
                                     SaAbsorbPolicy::outsideSubgroupOnly);
  EXPECT_TRUE(loose.isSubincrementalGroup[0]);
}

TEST(AccretionStats, TableRowA1Arithmetic) {
  auto stats = AccretionStats::fromCounts(7863, 2343, 113, 386, 0, 0);
  EXPECT_EQ(stats.totalGroups, 10206u);
  ASSERT_TRUE(stats.pctOld.has_value());
  EXPECT_NEAR(*stats.pctOld, 22.95, 0.01);
  EXPECT_EQ(stats.ig.total, 499u);
  ASSERT_TRUE(stats.ig.pctTotalOfOag.has_value());
  EXPECT_NEAR(*stats.ig.pctTotalOfOag, 21.29, 0.01);
}

TEST(AccretionStats, SyntheticFixtureMatchesBruteForce) {
  auto train = std::vector<GroupKey>{key({0, 1}), key({1, 2, 3}),
                                     key({3, 4}), key({0, 1, 2, 3}),
                                     key({2, 4})};
  auto test = std::vector<GroupKey>{key({0, 1, 4}), key({1, 2, 3, 4}),
                                    key({3, 4}), key({0, 9}), key({2, 3})};
  auto stats = computeAccretionStats(train, test);
  std::size_t expectedIg = 0, expectedSg = 0, expectedOag = 0;
  for (const auto& t : test) {
    auto expected = bruteForceDetect(train, t,
                                     SaAbsorbPolicy::outsideParentGroup);
    expectedIg += expected.ig;
    expectedSg += expected.sg;
    bool allOld = true;
    std::set<ActorIndex> oldActors;
    for (const auto& g : train) {
      oldActors.insert(g.members.begin(), g.members.end());
    }
    for (ActorIndex a : t.members) allOld &= oldActors.contains(a);
    expectedOag += allOld;
  }
  EXPECT_EQ(stats.ig.total, expectedIg);
  EXPECT_EQ(stats.sg.total, expectedSg);
  EXPECT_EQ(stats.oldActorGroups, expectedOag);
  EXPECT_EQ(stats.newActorGroups + stats.oldActorGroups, stats.totalGroups);
}

TEST(AccretionStats, ZeroOagReportsAbsentPercentages) {
  auto stats = AccretionStats::fromCounts(5, 0, 0, 0, 0, 0);
  EXPECT_FALSE(stats.ig.pctTotalOfOag.has_value());
  EXPECT_FALSE(stats.ig.pctNewOfTotal.has_value());
  ASSERT_TRUE(stats.pctNew.has_value());
  EXPECT_DOUBLE_EQ(*stats.pctNew, 100.0);
}

TEST(AccretionStats, InvariantUnderRecordPermutation) {
  auto train = std::vector<GroupKey>{key({0, 1}), key({1, 2, 3}), key({3, 4})};
  auto test = std::vector<GroupKey>{key({0, 1, 2}), key({1, 2, 3, 4})};
  auto base = computeAccretionStats(train, test);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    auto trainShuffled = train;
    auto testShuffled = test;
    std::shuffle(trainShuffled.begin(), trainShuffled.end(), rng);
    std::shuffle(testShuffled.begin(), testShuffled.end(), rng);
    auto stats = computeAccretionStats(trainShuffled, testShuffled);
    EXPECT_EQ(stats.ig.total, base.ig.total);
    EXPECT_EQ(stats.sg.total, base.sg.total);
    EXPECT_EQ(stats.oldActorGroups, base.oldActorGroups);
  }
}

TEST(RoundPercent, HalfAwayFromZero) {
  EXPECT_DOUBLE_EQ(roundPercent(22.9571), 22.96);
  EXPECT_DOUBLE_EQ(roundPercent(-22.9571), -22.96);
  EXPECT_DOUBLE_EQ(roundPercent(21.2975), 21.3);
  EXPECT_DOUBLE_EQ(roundPercent(100.0 * 2343 / 10206), 22.96);
}

}  // namespace
}  // namespace gacc
