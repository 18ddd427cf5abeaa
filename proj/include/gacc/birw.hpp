#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gacc/dense.hpp"
#include "gacc/scores.hpp"
#include "gacc/snapshot.hpp"
#include "gacc/sparse.hpp"

namespace gacc {

// How the starting point R0 = X / sum(X) reads sum(X): one grand total, or
// one sum per row of the inter network.
enum class BirwNormalization { grandTotal, perRow };

struct BirwParams {
  double alpha = 0.6;
  std::size_t lGroup = 4;
  std::size_t lOuter = 4;
  BirwNormalization normalization = BirwNormalization::grandTotal;

  void validate() const {
    // alpha = 0 is admitted: the recursion then collapses to the prior X
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("alpha must lie in [0,1]");
    }
    if (lGroup < 1 || lOuter < 1) {
      throw std::invalid_argument("path length caps must be at least 1");
    }
  }
};

// The three networks a group's alignment runs over: the complete graph on
// the group members, the adjacency among everyone else, and the bipartite
// links between the two sides.
struct AlignmentProblem {
  DenseMatrix cliqueAdjacency;  // c x c, ones off the diagonal
  SparseMatrix outer;           // (n-c) x (n-c)
  SparseMatrix inter;           // c x (n-c)
  IndexMap map;                 // outer-local <-> global actor indices
  GroupKey group;

  bool degenerate() const { return outer.rows() == 0; }
};

inline AlignmentProblem buildAlignmentProblem(const NetworkSnapshot& snapshot,
                                              const GroupKey& group) {
  if (group.members.back() >= snapshot.n) {
    throw std::invalid_argument("group " + group.describe() +
                                " not within snapshot actors");
  }
  AlignmentProblem problem;
  problem.group = group;
  const std::size_t c = group.size();
  problem.cliqueAdjacency = DenseMatrix(c, c, 1.0);
  for (std::size_t i = 0; i < c; ++i) problem.cliqueAdjacency(i, i) = 0.0;

  RestrictedAdjacency restricted = restrictAdjacency(snapshot, group);
  problem.map = std::move(restricted.map);
  problem.outer = std::move(restricted.outer);

  std::vector<Triplet> inter;
  for (std::size_t p = 0; p < c; ++p) {
    snapshot.adjacency.forEachInRow(
        group.members[p], [&](std::uint32_t q, double v) {
          if (problem.map.toLocal[q] >= 0) {
            inter.push_back({static_cast<std::uint32_t>(p),
                             static_cast<std::uint32_t>(problem.map.toLocal[q]),
                             v});
          }
        });
  }
  problem.inter = SparseMatrix::fromTriplets(c, snapshot.n - c,
                                             std::move(inter));
  return problem;
}

struct AlignmentResult {
  DenseMatrix r;  // c x (n-c) learned affinities
};

/**
 * Sequential bi-random walk: starting from the normalized inter network, each
 * step walks over the group clique (while t <= lGroup) and then over the
 * outer network (while t <= lOuter), blending the prior back in with weight
 * (1 - alpha). A zero inter network carries no prior evidence and yields an
 * all-zero result.
 */
inline AlignmentResult birwSeq(const AlignmentProblem& problem,
                               const BirwParams& params) {
  params.validate();
  const std::size_t c = problem.group.size();
  const std::size_t outerCount = problem.outer.rows();
  AlignmentResult result;
  if (problem.degenerate()) {
    result.r = DenseMatrix(c, 0);
    return result;
  }

  DenseMatrix prior(c, outerCount);
  double total = 0.0;
  problem.inter.forEach([&](std::uint32_t p, std::uint32_t q, double v) {
    prior(p, q) = v;
    total += v;
  });
  if (total == 0.0) {
    result.r = DenseMatrix(c, outerCount);
    return result;
  }

  DenseMatrix r = prior;
  if (params.normalization == BirwNormalization::grandTotal) {
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < outerCount; ++j) r(i, j) /= total;
    }
  } else {
    for (std::size_t i = 0; i < c; ++i) {
      double rowSum = 0.0;
      for (std::size_t j = 0; j < outerCount; ++j) rowSum += r(i, j);
      if (rowSum == 0.0) continue;  // unlinked member keeps a zero row
      for (std::size_t j = 0; j < outerCount; ++j) r(i, j) /= rowSum;
    }
  }

  const double alpha = params.alpha;
  const std::size_t steps = std::max(params.lGroup, params.lOuter);
  for (std::size_t t = 1; t <= steps; ++t) {
    if (t <= params.lGroup) {
      DenseMatrix walked = multiply(problem.cliqueAdjacency, r);
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < outerCount; ++j) {
          walked(i, j) = alpha * walked(i, j) + (1.0 - alpha) * prior(i, j);
        }
      }
      r = std::move(walked);
    }
    if (t <= params.lOuter) {
      DenseMatrix walked = multiply(r, problem.outer);
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < outerCount; ++j) {
          walked(i, j) = alpha * walked(i, j) + (1.0 - alpha) * prior(i, j);
        }
      }
      r = std::move(walked);
    }
  }
  result.r = std::move(r);
  return result;
}

// Column means of R, mapped back to global actor indices.
inline GroupActorScores scoreGroupBRWS(const AlignmentResult& result,
                                       const AlignmentProblem& problem) {
  const std::size_t c = problem.group.size();
  if (result.r.rows() != c || result.r.cols() != problem.outer.rows()) {
    throw std::invalid_argument("alignment result does not match problem");
  }
  GroupActorScores scores;
  scores.group = problem.group;
  for (std::size_t q = 0; q < result.r.cols(); ++q) {
    double sum = 0.0;
    for (std::size_t p = 0; p < c; ++p) sum += result.r(p, q);
    if (sum != 0.0) {
      // toGlobal is increasing, so entries come out already sorted
      scores.entries.emplace_back(problem.map.toGlobal[q],
                                  sum / static_cast<double>(c));
    }
  }
  return scores;
}

}  // namespace gacc
