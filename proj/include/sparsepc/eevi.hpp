#pragma once

// Squared eigenvector loadings recovered from eigenvalues of a symmetric
// matrix and of its leave-one-variable-out principal submatrices.

#include "sparsepc/linalg.hpp"

namespace sparsepc {

enum class LoadingKind { Exact, Approximate };

struct SquaredLoadings {
  Vector values;
  LoadingKind kind = LoadingKind::Approximate;
};

/// Per-variable ratio of approximate to sample loading magnitude.
struct LoadingRatios {
  Vector values;
};

/// Below this squared sample loading the ratio is defined as 0.
inline constexpr double kRatioDenominatorFloor = 1e-12;

/// Exact squared loadings of the i-th eigenvector (0-based, descending
/// eigenvalue order) computed purely from eigenvalues:
///
///   |v_i|_j^2 = prod_k (l_i(A) - l_k(M_j)) / prod_{k != i} (l_i(A) - l_k(A))
///
/// where M_j is A without row/column j. Oracle scale only (p <= 64); throws
/// DegenerateSpectrum when l_i(A) is within 1e-8 of another eigenvalue.
SquaredLoadings exact_identity_squared_loadings(const SymMatrix& a, Index i);

/// Approximate squared loadings of the first eigenvector from top
/// eigenvalues only: max(0, 1 - l_1(M_j) / l_1(A)).
SquaredLoadings approx_squared_loadings(const SymMatrix& a, double lambda1,
                                        const Vector& sub_lambda1);

/// sqrt(approx_j / v1_j^2); 0 where v1_j^2 < kRatioDenominatorFloor.
LoadingRatios loading_ratios(const SquaredLoadings& approx, const Vector& v1);

/// Top eigenvalue of every principal submatrix M_j by power iteration,
/// seeded with v1 minus entry j (renormalized; default start if that is
/// numerically zero).
Vector submatrix_top_eigenvalues(const SymMatrix& a, const Vector& v1,
                                 const PowerOptions& opts = {});

}  // namespace sparsepc
