#include "sparsepc/eevi.hpp"

#include <algorithm>
#include <string>

namespace sparsepc {

SquaredLoadings exact_identity_squared_loadings(const SymMatrix& a, Index i) {
  const Index p = a.dim();
  if (p > kExactSolverMaxDim) {
    throw Error(ErrorKind::DimensionTooLarge, "identity oracle is limited to p <= 64");
  }
  if (p < 2) {
    throw Error(ErrorKind::InvalidParameter, "identity needs p >= 2");
  }
  if (i < 0 || i >= p) {
    throw Error(ErrorKind::IndexOutOfRange, "eigenvector index " + std::to_string(i));
  }

  const std::vector<EigenPair> full = exact_symmetric_eigen(a);
  const double li = full[static_cast<size_t>(i)].value;

  std::vector<double> den;
  den.reserve(static_cast<size_t>(p - 1));
  for (Index k = 0; k < p; ++k) {
    if (k == i) continue;
    const double d = li - full[static_cast<size_t>(k)].value;
    if (std::abs(d) <= 1e-8) {
      throw Error(ErrorKind::DegenerateSpectrum,
                  "eigenvalue " + std::to_string(i) + " is repeated within 1e-8");
    }
    den.push_back(d);
  }

  SquaredLoadings out;
  out.kind = LoadingKind::Exact;
  out.values.resize(p);
  for (Index j = 0; j < p; ++j) {
    const std::vector<EigenPair> sub = exact_symmetric_eigen(principal_submatrix(a, j));
    // Pair numerator and denominator factors in sorted order; interlacing
    // keeps every partial ratio bounded, so the running product neither
    // overflows nor underflows.
    double prod = 1.0;
    for (size_t k = 0; k < den.size(); ++k) prod *= (li - sub[k].value) / den[k];
    out.values[j] = std::clamp(prod, 0.0, 1.0);
  }
  return out;
}

SquaredLoadings approx_squared_loadings(const SymMatrix& a, double lambda1,
                                        const Vector& sub_lambda1) {
  if (!(lambda1 > 0.0)) {
    throw Error(ErrorKind::NonPositiveEigenvalue, "top eigenvalue must be positive");
  }
  if (sub_lambda1.size() != a.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "need one submatrix eigenvalue per variable");
  }
  SquaredLoadings out;
  out.kind = LoadingKind::Approximate;
  out.values = (1.0 - sub_lambda1.array() / lambda1).cwiseMax(0.0).cwiseMin(1.0).matrix();
  return out;
}

LoadingRatios loading_ratios(const SquaredLoadings& approx, const Vector& v1) {
  if (approx.values.size() != v1.size()) {
    throw Error(ErrorKind::DimensionMismatch, "loading vectors differ in length");
  }
  LoadingRatios out;
  out.values.resize(v1.size());
  for (Index j = 0; j < v1.size(); ++j) {
    const double den = v1[j] * v1[j];
    out.values[j] = den < kRatioDenominatorFloor ? 0.0 : std::sqrt(approx.values[j] / den);
  }
  return out;
}

Vector submatrix_top_eigenvalues(const SymMatrix& a, const Vector& v1, const PowerOptions& opts) {
  const Index p = a.dim();
  if (v1.size() != p) {
    throw Error(ErrorKind::DimensionMismatch, "seed vector length differs from p");
  }
  if (p < 2) {
    throw Error(ErrorKind::InvalidParameter, "submatrices need p >= 2");
  }
  const Matrix& m = a.values();
  Vector out(p);
  Vector seed(p - 1);
  Vector full(p);

  for (Index j = 0; j < p; ++j) {
    const Index tail = p - j - 1;
    seed.head(j) = v1.head(j);
    seed.tail(tail) = v1.tail(tail);
    if (seed.norm() < 1e-12) seed = default_start_vector(p - 1);

    // M_j x without materializing M_j: multiply by the column blocks that
    // skip column j, then drop row j.
    auto apply = [&](const Vector& in, Vector& res) {
      full.noalias() = m.leftCols(j) * in.head(j);
      full.noalias() += m.rightCols(tail) * in.tail(tail);
      res.head(j) = full.head(j);
      res.tail(tail) = full.tail(tail);
    };
    // A zero submatrix yields value 0 from power_iterate.
    out[j] = detail::power_iterate(apply, seed, opts).value;
  }
  return out;
}

}  // namespace sparsepc
