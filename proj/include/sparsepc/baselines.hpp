#pragma once

#include <optional>
#include <vector>

#include "sparsepc/eespca.hpp"
#include "sparsepc/linalg.hpp"

namespace sparsepc {

/// L1 bound `c` on the loadings, 1 <= c <= sqrt(p).
struct SpcParams {
  double c = 1.0;
  double tol = 1e-6;
  int max_iter = 200;
};

/// Cardinality bound `k`, 1 <= k <= p.
struct CardinalityParams {
  int k = 1;
  double tol = 1e-8;
  int max_iter = 1000;
};

/// sign(x_j) * max(0, |x_j| - delta).
Vector soft_threshold(const Vector& x, double delta);

/// Smallest delta >= 0 such that the normalized soft-thresholded `a` has L1
/// norm <= c (bisection; 0 when the bound already holds at delta = 0).
double l1_bound_threshold(const Vector& a, double c);

/// Keeps the k largest-magnitude entries (lower index wins ties), zeroes the
/// rest.
Vector truncate_k(const Vector& x, int k);

/// Dense first PC by power iteration, packaged as a component.
SparseComponent pca_first_pc(const SymMatrix& cov, const PowerOptions& opts = {});

/// Penalized matrix decomposition, single factor: alternate
///   u <- Xv / ||Xv||,   v <- S(X^T u, d) / ||S(X^T u, d)||
/// with d chosen so that ||v||_1 <= c.
SparseComponent spc_first_pc(const DataMatrix& x, const SpcParams& params);

/// Truncated power iteration for the k-sparse top eigenvector. Starts from
/// `v0`, or from the plain power-iteration eigenvector when absent. When
/// `rayleigh_trace` is given it receives v^T cov v after every iteration.
SparseComponent tpower_first_pc(const SymMatrix& cov, const CardinalityParams& params,
                                const std::optional<Vector>& v0 = std::nullopt,
                                std::vector<double>* rayleigh_trace = nullptr);

/// Truncated Rayleigh-quotient ascent (B = I):
///   v <- normalize(truncate_k(v + (eta / rho) * cov * v)),  rho = v^T cov v.
/// eta <= 0 selects the default 0.01 * p. The step is halved whenever it
/// would lower the Rayleigh quotient.
SparseComponent rifle_first_pc(const SymMatrix& cov, const CardinalityParams& params,
                               const Vector& v0, double eta = 0.0);

/// Deflation loop around the single-PC routine of `method`. `params` holds
/// one sparsity value per component (c for SPC, k for TPower/rifle), or a
/// single value reused for every component; it is ignored for pca/eespca.
std::vector<SparseComponent> multi_pc(Method method, const DataMatrix& x, int k_components,
                                      const std::vector<double>& params);

/// First PC of `x` with `method` at sparsity `param` (ignored for
/// pca/eespca). Covariance-based methods use the sample covariance of `x`.
SparseComponent fit_first_pc(Method method, const DataMatrix& x, double param);

}  // namespace sparsepc
