#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gacc/dense.hpp"
#include "gacc/scores.hpp"
#include "gacc/snapshot.hpp"
#include "gacc/sparse.hpp"

namespace gacc {

enum class GlpsSolver { automatic, closedForm, iterative };

// Closed-form dense solves turn cubic beyond this; larger snapshots default
// to the iterative solver.
inline constexpr std::size_t kClosedFormVertexLimit = 5000;

struct GlpsParams {
  double mu = 0.1;
  GlpsSolver solver = GlpsSolver::automatic;
  double tol = 1e-8;
  std::size_t maxIter = 1000;

  double alpha() const { return 1.0 / (1.0 + mu); }

  void validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (maxIter < 1) throw std::invalid_argument("maxIter must be at least 1");
  }
};

struct PropagationOperator {
  SparseMatrix theta;  // n x n, symmetric, spectral radius <= 1
};

/**
 * Normalized hypergraph diffusion operator
 *   theta = Dv^{-1/2} H W De^{-1} H^T Dv^{-1/2}
 * with unit hyperedge weights. Vertices of degree zero take a zero row and
 * column (their Dv^{-1/2} entry is defined as 0), leaving them inert.
 */
inline PropagationOperator buildPropagationOperator(
    const NetworkSnapshot& snapshot) {
  std::vector<double> invSqrtDegree(snapshot.n, 0.0);
  for (std::size_t v = 0; v < snapshot.n; ++v) {
    if (snapshot.vertexDegree[v] > 0.0) {
      invSqrtDegree[v] = 1.0 / std::sqrt(snapshot.vertexDegree[v]);
    }
  }
  std::vector<Triplet> triplets;
  for (std::size_t g = 0; g < snapshot.groups.size(); ++g) {
    const auto& members = snapshot.groups[g].members;
    const double invEdgeDegree = 1.0 / snapshot.edgeDegree[g];
    for (ActorIndex u : members) {
      for (ActorIndex v : members) {
        // parenthesized so the (u,v) and (v,u) entries round identically
        triplets.push_back(
            {u, v, invEdgeDegree * (invSqrtDegree[u] * invSqrtDegree[v])});
      }
    }
  }
  return {SparseMatrix::fromTriplets(snapshot.n, snapshot.n,
                                     std::move(triplets))};
}

struct LabelVector {
  std::vector<double> values;
  bool converged = true;
  std::size_t iterations = 0;
};

namespace detail {

inline double solveResidual(const SparseMatrix& theta,
                            std::span<const double> f,
                            std::span<const double> y, double alpha) {
  const std::vector<double> tf = theta.multiplyVector(f);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst,
                     std::abs(f[i] - alpha * tf[i] - (1.0 - alpha) * y[i]));
  }
  return worst;
}

}  // namespace detail

// Solves (I - alpha*theta) f = (1-alpha) y for one or many label vectors.
// The closed-form path factorizes once and reuses the factors per group.
class LabelPropagator {
 public:
  LabelPropagator(const PropagationOperator& op, const GlpsParams& params)
      : op_(op), params_(params) {
    params_.validate();
    const std::size_t n = op.theta.rows();
    closedForm_ = params.solver == GlpsSolver::closedForm ||
                  (params.solver == GlpsSolver::automatic &&
                   n <= kClosedFormVertexLimit);
    if (closedForm_) {
      DenseMatrix system(n, n);
      for (std::size_t i = 0; i < n; ++i) system(i, i) = 1.0;
      const double alpha = params_.alpha();
      op.theta.forEach([&](std::uint32_t r, std::uint32_t c, double v) {
        system(r, c) -= alpha * v;
      });
      lu_.emplace(std::move(system));
    }
  }

  LabelVector solve(std::span<const double> y) const {
    const double alpha = params_.alpha();
    LabelVector out;
    if (closedForm_) {
      std::vector<double> rhs(y.begin(), y.end());
      for (double& v : rhs) v *= 1.0 - alpha;
      out.values = lu_->solve(rhs);
      return out;
    }
    // f^{k+1} = alpha*theta*f^k + (1-alpha)*y from f^0 = y, run until the
    // max-norm step is below tol and the residual contract holds
    std::vector<double> f(y.begin(), y.end());
    std::vector<double> next(f.size());
    for (std::size_t iter = 1; iter <= params_.maxIter; ++iter) {
      op_.theta.multiplyVectorInto(f, next);
      double step = 0.0;
      for (std::size_t i = 0; i < next.size(); ++i) {
        next[i] = alpha * next[i] + (1.0 - alpha) * y[i];
        step = std::max(step, std::abs(next[i] - f[i]));
      }
      f.swap(next);
      out.iterations = iter;
      if (step <= params_.tol &&
          detail::solveResidual(op_.theta, f, y, alpha) <= 10.0 * params_.tol) {
        out.values = std::move(f);
        return out;
      }
    }
    out.values = std::move(f);
    out.converged = false;
    return out;
  }

  LabelVector solve(const GroupKey& group) const {
    std::vector<double> y(op_.theta.rows(), 0.0);
    for (ActorIndex v : group.members) {
      y.at(v) = 1.0;
    }
    return solve(y);
  }

 private:
  const PropagationOperator& op_;
  GlpsParams params_;
  bool closedForm_ = false;
  std::optional<DenseLu> lu_;
};

inline LabelVector propagate(const PropagationOperator& op,
                             const GroupKey& group, const GlpsParams& params) {
  return LabelPropagator(op, params).solve(group);
}

inline LabelVector propagateLabels(const PropagationOperator& op,
                                   std::span<const double> y,
                                   const GlpsParams& params) {
  return LabelPropagator(op, params).solve(y);
}

// S(i,j) = f*(j) for external actors; members are excluded from the output.
inline GroupActorScores scoreGroupGLPS(const LabelVector& f,
                                       const GroupKey& group) {
  GroupActorScores scores;
  scores.group = group;
  for (std::uint32_t j = 0; j < f.values.size(); ++j) {
    if (f.values[j] != 0.0 && !group.contains(j)) {
      scores.entries.emplace_back(j, f.values[j]);
    }
  }
  return scores;
}

// Largest-magnitude eigenvalue estimate via power iteration; theta is
// symmetric so this approaches the spectral radius from below.
inline double estimateSpectralRadius(const SparseMatrix& symmetric,
                                     std::size_t iterations = 200) {
  const std::size_t n = symmetric.rows();
  if (n == 0) return 0.0;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    std::vector<double> w = symmetric.multiplyVector(v);
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) lambda += v[i] * w[i];
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return std::abs(lambda);
}

}  // namespace gacc
