#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sparsepc/eevi.hpp"
#include "sparsepc/linalg.hpp"

namespace sparsepc {

enum class Method { Pca, Eespca, Spc, Spc1se, TPower, Rifle };

std::string_view method_name(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

/// A unit-norm sparse loading vector plus the metadata every method reports.
struct SparseComponent {
  Vector loadings;
  std::vector<Index> support;  // ascending indices of nonzero loadings
  double eigenvalue = 0.0;     // loadings^T * cov * loadings
  Method method = Method::Eespca;
  std::optional<double> param;  // c (SPC) or k (TPower/rifle)
  double runtime = 0.0;         // seconds
  int iterations = 0;
  bool converged = true;
};

/// Canonicalizes the sign of `loadings`, fills the support and computes the
/// Rayleigh quotient against `cov`.
SparseComponent finalize_component(Vector loadings, const SymMatrix& cov, Method method);

struct EespcaOptions {
  PowerOptions power;      // full-matrix power iteration
  // Per-variable submatrix power iterations. Only the eigenvalue is used, so
  // these also stop on a small relative change of the Rayleigh quotient.
  PowerOptions submatrix{1e-8, 1000, 1e-8};
};

/// Intermediate quantities of a single EESPCA fit.
struct EespcaTrace {
  EigenPair principal;
  Vector sub_lambda1;
  SquaredLoadings approx;
  LoadingRatios ratios;
  Vector scaled;  // r .* v1, normalized, before truncation
  double threshold = 0.0;
  bool support_guard_used = false;
};

/// Sparse first principal component of a covariance matrix:
///   v1, l1 by power iteration; l1(M_j) for every principal submatrix;
///   approximate squared loadings 1 - l1(M_j)/l1; ratios r;
///   v = normalize(r .* v1); zero |v_j| < 1/sqrt(p); normalize;
///   eigenvalue = v^T cov v.
/// If truncation would empty the vector, the largest-magnitude entry is kept.
SparseComponent eespca_first_pc(const SymMatrix& cov, const EespcaOptions& opts = {},
                                EespcaTrace* trace = nullptr);

/// Fits `k` components on successive rank-1 deflations of `x`. Throws
/// RankExhausted if a residual becomes numerically zero first.
std::vector<SparseComponent> eespca_multi(const DataMatrix& x, int k,
                                          const EespcaOptions& opts = {});

/// ||X - sum of sequential rank-1 deflations||_F^2, applying the components
/// in order.
double reconstruction_error(const DataMatrix& x, const std::vector<SparseComponent>& components);

/// Shared deflation driver. `fit` receives the current residual (centered)
/// and the 0-based component index.
using ComponentFit = std::function<SparseComponent(const DataMatrix& residual, int index)>;
std::vector<SparseComponent> deflate_components(const DataMatrix& x, int k, const ComponentFit& fit);

}  // namespace sparsepc
