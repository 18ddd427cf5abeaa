#pragma once

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "gacc/oracles.hpp"
#include "gacc/pipeline.hpp"

namespace gacc {

struct VerifyResult {
  std::size_t checksRun = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

namespace detail {

// plain-loop replay of the bi-random walk recursion, kept free of the dense
// matrix helpers the scorer uses
inline std::vector<std::vector<double>> replayBirw(
    const AlignmentProblem& problem, const BirwParams& params) {
  const std::size_t c = problem.group.size();
  const std::size_t o = problem.outer.rows();
  std::vector<std::vector<double>> x(c, std::vector<double>(o, 0.0));
  double total = 0.0;
  problem.inter.forEach([&](std::uint32_t i, std::uint32_t j, double v) {
    x[i][j] = v;
    total += v;
  });
  std::vector<std::vector<double>> r(c, std::vector<double>(o, 0.0));
  if (total == 0.0) return r;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < o; ++j) r[i][j] = x[i][j] / total;
  }
  for (std::size_t t = 1; t <= std::max(params.lGroup, params.lOuter); ++t) {
    if (t <= params.lGroup) {
      std::vector<std::vector<double>> next(c, std::vector<double>(o, 0.0));
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t k = 0; k < c; ++k) {
          if (i == k) continue;
          for (std::size_t j = 0; j < o; ++j) next[i][j] += r[k][j];
        }
      }
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < o; ++j) {
          next[i][j] =
              params.alpha * next[i][j] + (1.0 - params.alpha) * x[i][j];
        }
      }
      r = std::move(next);
    }
    if (t <= params.lOuter) {
      std::vector<std::vector<double>> next(c, std::vector<double>(o, 0.0));
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t u = 0; u < o; ++u) {
          if (r[i][u] == 0.0) continue;
          problem.outer.forEachInRow(
              static_cast<std::uint32_t>(u),
              [&](std::uint32_t v, double w) { next[i][v] += r[i][u] * w; });
        }
      }
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < o; ++j) {
          next[i][j] =
              params.alpha * next[i][j] + (1.0 - params.alpha) * x[i][j];
        }
      }
      r = std::move(next);
    }
  }
  return r;
}

}  // namespace detail

// Desk-scale verification: re-derives scorer outputs with the brute-force
// oracles and rechecks the pipeline metrics. Sized for corpora the walk
// oracle can exhaust.
inline VerifyResult runVerify(const CollaborationCorpus& corpus,
                              const RunConfig& config) {
  const SplitSpec spec = config.splitSpec();
  const Split split = makeSplit(corpus, spec);
  const TrainingView view = buildTrainingView(corpus, split);
  if (view.snapshot.n > oracles::kMaxWalkVertices) {
    throw std::invalid_argument(
        "verify requires at most " +
        std::to_string(oracles::kMaxWalkVertices) +
        " training actors (corpus has " + std::to_string(view.snapshot.n) +
        "); walk oracle limits: " + std::to_string(oracles::kMaxWalkVertices) +
        " vertices, length " + std::to_string(oracles::kMaxWalkLength));
  }
  if (config.maxLength > oracles::kMaxWalkLength) {
    throw std::invalid_argument("verify caps --max-length at " +
                                std::to_string(oracles::kMaxWalkLength));
  }
  if (view.snapshot.groups.empty()) {
    throw std::invalid_argument("verify needs a non-empty training side");
  }

  VerifyResult result;
  auto check = [&](const std::string& name, bool pass,
                   const std::string& detail = "") {
    ++result.checksRun;
    if (pass) {
      std::cout << "[ok]   " << name << '\n';
    } else {
      std::cout << "[FAIL] " << name << (detail.empty() ? "" : ": " + detail)
                << '\n';
      result.failures.push_back(name);
    }
  };

  const NetworkSnapshot& snap = view.snapshot;
  const std::size_t n = snap.n;

  // snapshot invariants
  {
    bool symmetric = snap.adjacency.isSymmetric();
    bool zeroDiag = true;
    bool pairRule = true;
    for (std::uint32_t p = 0; p < n; ++p) {
      if (snap.adjacency.at(p, p) != 0.0) zeroDiag = false;
      for (std::uint32_t q = 0; q < n; ++q) {
        bool together = false;
        for (const GroupKey& g : snap.groups) {
          if (p != q && g.contains(p) && g.contains(q)) together = true;
        }
        if (snap.adjacency.at(p, q) != (together ? 1.0 : 0.0)) pairRule = false;
      }
    }
    bool degrees = true;
    for (std::size_t g = 0; g < snap.groups.size(); ++g) {
      if (snap.edgeDegree[g] != static_cast<double>(snap.groups[g].size())) {
        degrees = false;
      }
    }
    check("snapshot adjacency symmetric", symmetric);
    check("snapshot adjacency zero diagonal", zeroDiag);
    check("snapshot pair rule A(p,q)=1 iff shared group", pairRule);
    check("incidence column sums equal cardinalities", degrees);
  }

  // Katz against the exhaustive walk oracle
  KatzParams katzParams{config.beta, config.maxLength};
  KatzMatrix katz = computeKatz(snap, katzParams);
  if (config.mutate && katz.k.nonZeroCount() > 0) {
    // fault injection: bump one entry so the oracle comparison must fail
    std::vector<Triplet> bumped;
    katz.k.forEach([&](std::uint32_t r, std::uint32_t c, double v) {
      bumped.push_back({r, c, v});
    });
    bumped.front().value += 1e-3;
    katz.k = SparseMatrix::fromTriplets(n, n, std::move(bumped));
  }
  {
    double worst = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        double expected = 0.0;
        double factor = 1.0;
        for (std::size_t l = 1; l <= config.maxLength; ++l) {
          factor *= config.beta;
          expected += factor * static_cast<double>(oracles::walkCountOracle(
                                   snap.adjacency, i, j, l));
        }
        worst = std::max(worst, std::abs(katz.k.at(i, j) - expected));
      }
    }
    check("katz equals walk-count oracle", worst <= 1e-12,
          "max deviation " + detail::formatDouble(worst));
  }
  {
    double worst = 0.0;
    for (const GroupKey& group : snap.groups) {
      auto scores = scoreGroupGKS(snap, katz, group);
      for (std::uint32_t j = 0; j < n; ++j) {
        if (group.contains(j)) continue;
        double expected = 0.0;
        for (ActorIndex p : group.members) {
          double factor = 1.0;
          for (std::size_t l = 1; l <= config.maxLength; ++l) {
            factor *= config.beta;
            expected += factor * static_cast<double>(oracles::walkCountOracle(
                                     snap.adjacency, p, j, l));
          }
        }
        expected /= static_cast<double>(group.size());
        worst = std::max(worst, std::abs(scores.scoreOf(j) - expected));
      }
    }
    check("gks scores equal averaged walk sums", worst <= 1e-12,
          "max deviation " + detail::formatDouble(worst));
  }

  // label propagation against the dense-solve oracle, both solvers
  {
    const PropagationOperator op = buildPropagationOperator(snap);
    check("theta spectral radius within 1",
          estimateSpectralRadius(op.theta) <= 1.0 + 1e-9);
    double worstClosed = 0.0, worstIterative = 0.0;
    for (const GroupKey& group : snap.groups) {
      std::vector<double> y(n, 0.0);
      for (ActorIndex v : group.members) y[v] = 1.0;
      GlpsParams closed{config.muGlobal(), GlpsSolver::closedForm, config.tol,
                        100000};
      GlpsParams iterative{config.muGlobal(), GlpsSolver::iterative,
                           std::min(config.tol, 1e-10), 100000};
      auto fc = propagate(op, group, closed);
      auto fi = propagate(op, group, iterative);
      auto fo = oracles::denseSolveOracle(op.theta, y, closed.alpha());
      for (std::size_t i = 0; i < n; ++i) {
        worstClosed = std::max(worstClosed, std::abs(fc.values[i] - fo[i]));
        worstIterative = std::max(worstIterative,
                                  std::abs(fi.values[i] - fo[i]));
      }
    }
    check("glps closed form matches dense-solve oracle", worstClosed <= 1e-8,
          "max deviation " + detail::formatDouble(worstClosed));
    check("glps iterative matches dense-solve oracle",
          worstIterative <= 1e-8,
          "max deviation " + detail::formatDouble(worstIterative));
  }

  // bi-random walk against the plain-loop replay
  {
    double worst = 0.0;
    const BirwParams params{config.alpha, config.lGroup, config.lOuter};
    for (const GroupKey& group : snap.groups) {
      if (group.size() >= n) continue;
      auto problem = buildAlignmentProblem(snap, group);
      auto fast = birwSeq(problem, params);
      auto slow = detail::replayBirw(problem, params);
      for (std::size_t i = 0; i < fast.r.rows(); ++i) {
        for (std::size_t j = 0; j < fast.r.cols(); ++j) {
          worst = std::max(worst, std::abs(fast.r(i, j) - slow[i][j]));
        }
      }
    }
    check("birw matches plain-loop replay", worst <= 1e-12,
          "max deviation " + detail::formatDouble(worst));
  }

  // pipeline metrics against the exhaustive matching oracle
  {
    MethodScorer scorer(Method::gks, snap, config, config.muGlobal());
    bool metricsAgree = true;
    for (bool saMode : {false, true}) {
      ScoredLists lists = scoreAndRank(view, scorer, saMode, config, false);
      auto report = evaluate(lists.global, snap.groups, view.testLocal,
                             saMode ? EvalMode::globalSA : EvalMode::globalIA,
                             {config.zeroRecall, config.saPolicy});
      std::vector<GroupKey> candidateKeys;
      for (const auto& e : lists.global.entries) {
        candidateKeys.push_back(e.result);
      }
      const std::size_t hits =
          oracles::exhaustiveMatchOracle(candidateKeys, view.testLocal).size();
      const double expectedPrecision =
          static_cast<double>(hits) / static_cast<double>(config.nTop);
      if (!report.precisionAtN.has_value() ||
          *report.precisionAtN != expectedPrecision) {
        metricsAgree = false;
      }
    }
    check("global metrics match exhaustive matching oracle", metricsAgree);
  }

  return result;
}

}  // namespace gacc
