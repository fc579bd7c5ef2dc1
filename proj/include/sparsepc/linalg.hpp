#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "sparsepc/error.hpp"

namespace sparsepc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// n x p observations (rows are samples, columns are variables).
///
/// The `centered` flag is checked on construction: a matrix claiming to be
/// centered must have every column mean within 1e-10 of that column's
/// max-abs entry.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values, bool centered = false);

  // Skips the centering check. Used for results that are centered by
  // construction (e.g. deflation residuals of a centered matrix).
  static DataMatrix trusted(Matrix values, bool centered);

  const Matrix& values() const noexcept { return values_; }
  Index n() const noexcept { return values_.rows(); }
  Index p() const noexcept { return values_.cols(); }
  bool centered() const noexcept { return centered_; }

 private:
  struct TrustedTag {};
  DataMatrix(TrustedTag, Matrix values, bool centered)
      : values_(std::move(values)), centered_(centered) {}

  Matrix values_;
  bool centered_ = false;
};

/// Square symmetric matrix; asymmetry beyond 1e-12 * max|a_ij| is rejected.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.rows(); }
  double operator()(Index i, Index j) const { return values_(i, j); }

 private:
  Matrix values_;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
  bool converged = false;
};

struct PowerOptions {
  double tol = 1e-8;  // L2 change between successive unit iterates
  int max_iter = 1000;
  // When > 0, also stop once the Rayleigh quotient changes by at most
  // value_tol * |quotient| between iterations.
  double value_tol = 0.0;
};

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is
/// non-negative.
void canonicalize_sign(Vector& v);

/// Normalized all-ones vector with a +1e-6 * index perturbation.
Vector default_start_vector(Index p);

DataMatrix mean_center(const DataMatrix& x);

/// (1/(n-1)) X^T X for a centered X.
SymMatrix sample_covariance(const DataMatrix& x);

/// Dominant eigenpair by power iteration. Convergence is declared when the
/// L2 change between successive (sign-aligned) unit iterates is <= tol.
/// Hitting max_iter is reported through `converged = false`, not thrown.
EigenPair power_iteration(const SymMatrix& a, const PowerOptions& opts = {},
                          const std::optional<Vector>& start = std::nullopt);

/// Cyclic Jacobi eigensolver, eigenpairs sorted by descending eigenvalue.
/// Limited to p <= 64.
std::vector<EigenPair> exact_symmetric_eigen(const SymMatrix& a);

inline constexpr Index kExactSolverMaxDim = 64;

/// A with row and column j removed.
SymMatrix principal_submatrix(const SymMatrix& a, Index j);

/// X - (X v) v^T for unit-norm v.
DataMatrix rank1_residual(const DataMatrix& x, const Vector& v);

double frobenius_sq(const DataMatrix& x);
double frobenius_sq(const Matrix& x);

namespace detail {

// Unit-norm check shared by the deflation routines.
void require_unit_norm(const Vector& v, double tol);

Matrix covariance_of(const Matrix& centered_values);

// Power iteration over an arbitrary symmetric operator `apply(in, out)`.
// `v` is the (nonzero) start vector. The returned vector is NOT sign
// canonicalized; callers do that when the vector escapes.
template <class Apply>
EigenPair power_iterate(Apply&& apply, Vector v, const PowerOptions& opts) {
  EigenPair out;
  const double start_norm = v.norm();
  if (!(start_norm > 0.0) || !std::isfinite(start_norm)) {
    throw Error(ErrorKind::InvalidParameter, "power iteration start vector is zero");
  }
  v /= start_norm;
  Vector w(v.size());
  double prev_quotient = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    apply(v, w);
    const double quotient = v.dot(w);
    if (opts.value_tol > 0.0 && it > 1 &&
        std::abs(quotient - prev_quotient) <= opts.value_tol * std::abs(quotient)) {
      out.converged = true;
      out.iterations = it;
      out.value = quotient;
      out.vector = std::move(v);
      return out;
    }
    prev_quotient = quotient;
    const double nw = w.norm();
    out.iterations = it;
    if (nw == 0.0) {
      // v lies in the null space; nothing left to iterate on.
      out.vector = v;
      out.value = 0.0;
      out.converged = false;
      return out;
    }
    w /= nw;
    const double change = (w.dot(v) < 0.0) ? (w + v).norm() : (w - v).norm();
    v.swap(w);
    if (change <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  apply(v, w);
  out.value = v.dot(w);
  out.vector = std::move(v);
  return out;
}

}  // namespace detail

}  // namespace sparsepc
