#pragma once

#include <stdexcept>
#include <vector>

#include "gacc/scores.hpp"
#include "gacc/snapshot.hpp"
#include "gacc/sparse.hpp"

namespace gacc {

struct KatzParams {
  double beta = 0.5;
  std::size_t maxLength = 4;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) {
      throw std::invalid_argument("beta must lie in (0,1)");
    }
    if (maxLength < 1) {
      throw std::invalid_argument("maxLength must be at least 1");
    }
  }
};

struct KatzMatrix {
  SparseMatrix k;  // n x n accumulated walk scores
};

/**
 * Truncated Katz proximity K = sum_{l=1..maxLength} beta^l A^l, accumulated
 * by iterated sparse multiplication. Built once per snapshot and shared by
 * every group's scoring pass.
 */
inline KatzMatrix computeKatz(const NetworkSnapshot& snapshot,
                              const KatzParams& params) {
  params.validate();
  const SparseMatrix& a = snapshot.adjacency;
  SparseMatrix power = a;
  double factor = params.beta;
  SparseMatrix k = power.scaled(factor);
  for (std::size_t l = 2; l <= params.maxLength; ++l) {
    power = multiply(power, a);
    factor *= params.beta;
    k = addScaled(k, 1.0, power, factor);
  }
  return {std::move(k)};
}

// Average Katz proximity of the group's members to each external actor.
inline GroupActorScores scoreGroupGKS(const NetworkSnapshot& snapshot,
                                      const KatzMatrix& katz,
                                      const GroupKey& group) {
  if (group.members.back() >= snapshot.n) {
    throw std::invalid_argument("group " + group.describe() +
                                " not within snapshot actors");
  }
  std::vector<double> sum(snapshot.n, 0.0);
  for (ActorIndex p : group.members) {
    katz.k.forEachInRow(p, [&](std::uint32_t j, double v) { sum[j] += v; });
  }
  const double inverseCardinality = 1.0 / static_cast<double>(group.size());
  GroupActorScores scores;
  scores.group = group;
  for (std::uint32_t j = 0; j < snapshot.n; ++j) {
    if (sum[j] != 0.0 && !group.contains(j)) {
      scores.entries.emplace_back(j, sum[j] * inverseCardinality);
    }
  }
  return scores;
}

}  // namespace gacc
