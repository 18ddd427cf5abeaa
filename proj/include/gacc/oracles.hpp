#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gacc/snapshot.hpp"
#include "gacc/sparse.hpp"

// Naive reference implementations used by the test suite and the CLI
// `verify` command. They deliberately share no kernels with the main
// modules: walks are counted by explicit DFS, linear systems are solved by
// plain Gauss-Jordan elimination on copied dense arrays, and candidate
// matching is a quadratic scan.

namespace gacc::oracles {

inline constexpr std::size_t kMaxWalkVertices = 12;
inline constexpr std::size_t kMaxWalkLength = 6;
inline constexpr std::size_t kMaxSolveVertices = 200;

// Exhaustive count of length-`length` walks from i to j over a 0/1 adjacency.
inline std::uint64_t walkCountOracle(const SparseMatrix& adjacency,
                                     std::uint32_t i, std::uint32_t j,
                                     std::size_t length) {
  if (adjacency.rows() != adjacency.cols()) {
    throw std::invalid_argument("walk oracle needs a square adjacency");
  }
  if (adjacency.rows() > kMaxWalkVertices || length > kMaxWalkLength) {
    throw std::invalid_argument("walk oracle limits exceeded (max " +
                                std::to_string(kMaxWalkVertices) +
                                " vertices, length " +
                                std::to_string(kMaxWalkLength) + ")");
  }
  if (length == 0) return i == j ? 1 : 0;
  std::uint64_t count = 0;
  auto dfs = [&](auto&& self, std::uint32_t at, std::size_t remaining) -> void {
    if (remaining == 0) {
      if (at == j) ++count;
      return;
    }
    for (std::uint32_t next : adjacency.rowCols(at)) {
      self(self, next, remaining - 1);
    }
  };
  dfs(dfs, i, length);
  return count;
}

// Gauss-Jordan solve of (I - alpha*theta) f = (1 - alpha) y on dense copies.
inline std::vector<double> denseSolveOracle(const SparseMatrix& theta,
                                            std::span<const double> y,
                                            double alpha) {
  const std::size_t n = theta.rows();
  if (theta.cols() != n || y.size() != n) {
    throw std::invalid_argument("dense solve oracle shape mismatch");
  }
  if (n > kMaxSolveVertices) {
    throw std::invalid_argument("dense solve oracle limited to " +
                                std::to_string(kMaxSolveVertices) +
                                " vertices");
  }
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = 1.0;
    m[i][n] = (1.0 - alpha) * y[i];
  }
  theta.forEach([&](std::uint32_t r, std::uint32_t c, double v) {
    m[r][c] -= alpha * v;
  });
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m[i][k]) > std::abs(m[pivot][k])) pivot = i;
    }
    if (m[pivot][k] == 0.0) {
      throw std::runtime_error("singular system in dense solve oracle");
    }
    std::swap(m[k], m[pivot]);
    const double d = m[k][k];
    for (std::size_t j = k; j <= n; ++j) m[k][j] /= d;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m[i][k] == 0.0) continue;
      const double f = m[i][k];
      for (std::size_t j = k; j <= n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n];
  return x;
}

// Quadratic candidate-vs-test matching: positions of candidates whose member
// set equals some test group.
inline std::vector<std::size_t> exhaustiveMatchOracle(
    const std::vector<GroupKey>& candidates,
    const std::vector<GroupKey>& testGroups) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (const GroupKey& t : testGroups) {
      if (candidates[i] == t) {
        hits.push_back(i);
        break;
      }
    }
  }
  return hits;
}

}  // namespace gacc::oracles
