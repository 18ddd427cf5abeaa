#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gacc/pipeline.hpp"
#include "gacc/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitVerifyFailure = 2;

struct CliOptions {
  gacc::RunConfig config;
  std::string methodText = "all";
  std::string modeText = "both";
  std::string saAbsorbText = "outside-parent";
  std::string zeroRecallText = "zero";
  std::string birwNormText = "grand-total";
  std::vector<std::string> rankedPaths;  // evaluate inputs
};

void addCommonFlags(CLI::App* cmd, CliOptions& opt, bool multiSplit) {
  cmd->add_option("--corpus", opt.config.corpusPath, "corpus TSV file")
      ->required();
  auto* split = cmd->add_option("--split", opt.config.splits,
                                "split preset (main, main-2004, A.1..A.9) or "
                                "YYYY-YYYY:YYYY-YYYY");
  if (!multiSplit) split->expected(1);
  cmd->add_option("--out", opt.config.outputDir, "output directory");
  cmd->add_option("--threads", opt.config.threads, "worker thread cap");
  cmd->add_option("--seed", opt.config.seed,
                  "reserved; runs are deterministic");
}

void addScoringFlags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--method", opt.methodText, "gks, brws, glps or all");
  cmd->add_option("--mode", opt.modeText, "ia, sa or both");
  cmd->add_option("--beta", opt.config.beta, "Katz damping, in (0,1)")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--max-length", opt.config.maxLength,
                  "Katz path length cap");
  cmd->add_option("--alpha", opt.config.alpha,
                  "bi-random-walk decay, in (0,1]")
      ->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--lg", opt.config.lGroup, "group-side walk length cap");
  cmd->add_option("--lo", opt.config.lOuter, "outer-side walk length cap");
  cmd->add_option("--birw-norm", opt.birwNormText,
                  "inter-network normalization: grand-total or per-row");
  cmd->add_option("--mu", opt.config.mu,
                  "label-propagation regularization (default 0.1 global, "
                  "0.5 per-group)");
  cmd->add_option("--tol", opt.config.tol, "iterative solver tolerance");
  cmd->add_option("--sa-cap", opt.config.saEnumCap,
                  "skip SA enumeration for groups larger than this");
}

void addCutoffFlags(CLI::App* cmd, CliOptions& opt, bool* nTopSet,
                    bool* nTopGroupSet) {
  auto* nTop = cmd->add_option("--n-top", opt.config.nTop,
                               "global ranked-list cutoff");
  auto* nTopGroup = cmd->add_option("--n-top-group", opt.config.nTopPerGroup,
                                    "per-group ranked-list cutoff");
  if (nTopSet) {
    nTop->each([nTopSet](const std::string&) { *nTopSet = true; });
  }
  if (nTopGroupSet) {
    nTopGroup->each([nTopGroupSet](const std::string&) {
      *nTopGroupSet = true;
    });
  }
}

void resolveEnums(CliOptions& opt) {
  if (opt.methodText == "all") {
    opt.config.methods = {gacc::Method::gks, gacc::Method::brws,
                          gacc::Method::glps};
  } else {
    opt.config.methods = {gacc::parseMethod(opt.methodText)};
  }
  if (opt.modeText == "ia") {
    opt.config.mode = gacc::RunMode::ia;
  } else if (opt.modeText == "sa") {
    opt.config.mode = gacc::RunMode::sa;
  } else if (opt.modeText == "both") {
    opt.config.mode = gacc::RunMode::both;
  } else {
    throw std::invalid_argument("unknown mode '" + opt.modeText +
                                "' (expected ia, sa or both)");
  }
  if (opt.saAbsorbText == "outside-parent") {
    opt.config.saPolicy = gacc::SaAbsorbPolicy::outsideParentGroup;
  } else if (opt.saAbsorbText == "outside-subgroup") {
    opt.config.saPolicy = gacc::SaAbsorbPolicy::outsideSubgroupOnly;
  } else {
    throw std::invalid_argument("unknown --sa-absorb value '" +
                                opt.saAbsorbText + "'");
  }
  if (opt.zeroRecallText == "zero") {
    opt.config.zeroRecall = gacc::ZeroDenominatorPolicy::countAsZero;
  } else if (opt.zeroRecallText == "exclude") {
    opt.config.zeroRecall = gacc::ZeroDenominatorPolicy::excludeGroup;
  } else {
    throw std::invalid_argument("unknown --recall-zero-denominator value '" +
                                opt.zeroRecallText + "'");
  }
  if (opt.birwNormText == "grand-total") {
    opt.config.birwNorm = gacc::BirwNormalization::grandTotal;
  } else if (opt.birwNormText == "per-row") {
    opt.config.birwNorm = gacc::BirwNormalization::perRow;
  } else {
    throw std::invalid_argument("unknown --birw-norm value '" +
                                opt.birwNormText + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"small-group accretion scoring and evaluation"};
  app.require_subcommand(1);
  // key=value file with one [section] per subcommand; explicit flags win
  app.set_config("--config", "", "optional key=value config file");

  CliOptions opt;

  auto* stats = app.add_subcommand(
      "stats", "incremental statistics of the test period per split");
  addCommonFlags(stats, opt, true);
  stats->add_option("--sa-absorb", opt.saAbsorbText,
                    "outside-parent or outside-subgroup");

  auto* score = app.add_subcommand(
      "score", "rank candidate groups for each scoring method");
  addCommonFlags(score, opt, false);
  addScoringFlags(score, opt);
  addCutoffFlags(score, opt, nullptr, nullptr);
  score->add_flag("--per-group", opt.config.perGroup,
                  "also write per-group top lists");

  auto* evaluate = app.add_subcommand(
      "evaluate", "precision/recall of ranked lists against the test period");
  addCommonFlags(evaluate, opt, false);
  addCutoffFlags(evaluate, opt, &opt.config.nTopExplicit,
                 &opt.config.nTopPerGroupExplicit);
  evaluate->add_option("ranked", opt.rankedPaths,
                       "ranked list files from `score` (per-group shards "
                       "may be passed together)")
      ->required();
  evaluate->add_option("--sa-absorb", opt.saAbsorbText,
                       "outside-parent or outside-subgroup");
  evaluate->add_option("--recall-zero-denominator", opt.zeroRecallText,
                       "zero (count eventless groups as 0) or exclude");

  auto* verify = app.add_subcommand(
      "verify", "cross-check every scorer against the brute-force oracles");
  addCommonFlags(verify, opt, false);
  addScoringFlags(verify, opt);
  addCutoffFlags(verify, opt, nullptr, nullptr);
  verify->add_flag("--mutate", opt.config.mutate,
                   "inject a scorer fault (negative control; must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    resolveEnums(opt);
    const auto corpus = gacc::CollaborationCorpus::ingest(opt.config.corpusPath);
    for (const std::string& w : corpus.warnings()) {
      std::cerr << "warning: " << w << '\n';
    }
    if (stats->parsed()) {
      auto path = gacc::runStats(corpus, opt.config);
      std::cout << "wrote " << path.string() << '\n';
    } else if (score->parsed()) {
      auto files = gacc::runScore(corpus, opt.config);
      for (const auto& set : files) {
        std::cout << "wrote " << set.global.string() << '\n';
        for (const auto& shard : set.perGroupShards) {
          std::cout << "wrote " << shard.string() << '\n';
        }
      }
    } else if (evaluate->parsed()) {
      std::vector<std::filesystem::path> paths(opt.rankedPaths.begin(),
                                               opt.rankedPaths.end());
      auto outcome = gacc::runEvaluate(corpus, opt.config, paths);
      std::ifstream report(outcome.reportPath);
      std::string line;
      while (std::getline(report, line)) {
        if (!line.empty() && line.front() != '#') std::cout << line << '\n';
      }
      std::cout << "wrote " << outcome.reportPath.string() << '\n';
    } else if (verify->parsed()) {
      auto result = gacc::runVerify(corpus, opt.config);
      std::cout << result.checksRun - result.failures.size() << "/"
                << result.checksRun << " checks passed\n";
      if (!result.ok()) return kExitVerifyFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}
