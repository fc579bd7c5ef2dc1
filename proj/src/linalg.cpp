#include "sparsepc/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sparsepc {

namespace {

bool columns_centered(const Matrix& m) {
  const double n = static_cast<double>(m.rows());
  for (Index j = 0; j < m.cols(); ++j) {
    const double scale = m.col(j).cwiseAbs().maxCoeff();
    const double mean = m.col(j).sum() / n;
    if (std::abs(mean) > 1e-10 * std::max(scale, 1e-300)) return false;
  }
  return true;
}

}  // namespace

DataMatrix::DataMatrix(Matrix values, bool centered)
    : values_(std::move(values)), centered_(centered) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorKind::EmptyMatrix, "data matrix has no rows or columns");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorKind::InvalidParameter, "data matrix contains non-finite values");
  }
  if (centered_ && !columns_centered(values_)) {
    throw Error(ErrorKind::NotCentered, "matrix flagged centered has non-zero column means");
  }
}

DataMatrix DataMatrix::trusted(Matrix values, bool centered) {
  return DataMatrix(TrustedTag{}, std::move(values), centered);
}

SymMatrix::SymMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "symmetric matrix must be square");
  }
  if (values_.rows() < 1) {
    throw Error(ErrorKind::EmptyMatrix, "symmetric matrix is empty");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorKind::InvalidParameter, "symmetric matrix contains non-finite values");
  }
  const double scale = values_.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * scale;
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = j + 1; i < values_.rows(); ++i) {
      if (std::abs(values_(i, j) - values_(j, i)) > tol) {
        throw Error(ErrorKind::NotSymmetric,
                    "entries (" + std::to_string(i) + "," + std::to_string(j) + ") differ");
      }
    }
  }
}

void canonicalize_sign(Vector& v) {
  if (v.size() == 0) return;
  Index best = 0;
  double best_abs = std::abs(v[0]);
  for (Index i = 1; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v[best] < 0.0) v = -v;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) v[i] = 0.0;  // no negative zeros
  }
}

Vector default_start_vector(Index p) {
  Vector v(p);
  for (Index i = 0; i < p; ++i) v[i] = 1.0 + 1e-6 * static_cast<double>(i);
  return v.normalized();
}

DataMatrix mean_center(const DataMatrix& x) {
  if (x.n() < 2 || x.p() < 1) {
    throw Error(ErrorKind::EmptyMatrix, "centering needs at least 2 rows");
  }
  if (x.centered()) return x;
  Matrix out = x.values();
  out.rowwise() -= out.colwise().mean();
  return DataMatrix::trusted(std::move(out), true);
}

namespace detail {

Matrix covariance_of(const Matrix& xs) {
  const Index p = xs.cols();
  Matrix cov = Matrix::Zero(p, p);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(xs.transpose(),
                                                 1.0 / static_cast<double>(xs.rows() - 1));
  cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
  return cov;
}

void require_unit_norm(const Vector& v, double tol) {
  const double norm = v.norm();
  if (!(std::abs(norm - 1.0) <= tol)) {
    throw Error(ErrorKind::NormViolation, "vector norm " + std::to_string(norm) + " is not 1");
  }
}

}  // namespace detail

SymMatrix sample_covariance(const DataMatrix& x) {
  if (!x.centered()) {
    throw Error(ErrorKind::NotCentered, "sample covariance requires a centered matrix");
  }
  if (x.n() < 2) {
    throw Error(ErrorKind::EmptyMatrix, "sample covariance needs at least 2 rows");
  }
  return SymMatrix(detail::covariance_of(x.values()));
}

EigenPair power_iteration(const SymMatrix& a, const PowerOptions& opts,
                          const std::optional<Vector>& start) {
  const Matrix& m = a.values();
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorKind::ZeroMatrix, "power iteration on the zero matrix");
  }
  Vector v0;
  if (start) {
    if (start->size() != a.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "start vector length differs from matrix dimension");
    }
    v0 = *start;
  } else {
    v0 = default_start_vector(a.dim());
  }
  auto apply = [&m](const Vector& in, Vector& out) { out.noalias() = m * in; };
  EigenPair pair = detail::power_iterate(apply, std::move(v0), opts);
  canonicalize_sign(pair.vector);
  return pair;
}

std::vector<EigenPair> exact_symmetric_eigen(const SymMatrix& a) {
  const Index p = a.dim();
  if (p > kExactSolverMaxDim) {
    throw Error(ErrorKind::DimensionTooLarge,
                "exact eigensolver is limited to p <= " + std::to_string(kExactSolverMaxDim));
  }
  Matrix m = a.values();
  Matrix vecs = Matrix::Identity(p, p);
  const double total = m.squaredNorm();
  int sweeps = 0;
  constexpr int kMaxSweeps = 100;

  for (; sweeps < kMaxSweeps; ++sweeps) {
    double off = 0.0;
    for (Index q = 1; q < p; ++q)
      for (Index r = 0; r < q; ++r) off += m(r, q) * m(r, q);
    if (off <= 1e-32 * total) break;

    for (Index r = 0; r < p - 1; ++r) {
      for (Index q = r + 1; q < p; ++q) {
        const double arq = m(r, q);
        if (arq == 0.0) continue;
        const double theta = (m(q, q) - m(r, r)) / (2.0 * arq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        m(r, r) -= t * arq;
        m(q, q) += t * arq;
        m(r, q) = 0.0;
        m(q, r) = 0.0;
        for (Index k = 0; k < p; ++k) {
          if (k == r || k == q) continue;
          const double akr = m(k, r);
          const double akq = m(k, q);
          m(k, r) = c * akr - s * akq;
          m(r, k) = m(k, r);
          m(k, q) = s * akr + c * akq;
          m(q, k) = m(k, q);
        }
        for (Index k = 0; k < p; ++k) {
          const double vkr = vecs(k, r);
          const double vkq = vecs(k, q);
          vecs(k, r) = c * vkr - s * vkq;
          vecs(k, q) = s * vkr + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&m](Index l, Index r) { return m(l, l) > m(r, r); });

  std::vector<EigenPair> pairs;
  pairs.reserve(order.size());
  for (Index idx : order) {
    EigenPair pair;
    pair.value = m(idx, idx);
    pair.vector = vecs.col(idx);
    canonicalize_sign(pair.vector);
    pair.iterations = sweeps;
    pair.converged = sweeps < kMaxSweeps;
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

SymMatrix principal_submatrix(const SymMatrix& a, Index j) {
  const Index p = a.dim();
  if (p < 2) {
    throw Error(ErrorKind::InvalidParameter, "principal submatrix needs p >= 2");
  }
  if (j < 0 || j >= p) {
    throw Error(ErrorKind::IndexOutOfRange,
                "index " + std::to_string(j) + " outside [0," + std::to_string(p) + ")");
  }
  const Index k = p - 1;
  const Index tail = p - j - 1;
  const Matrix& m = a.values();
  Matrix out(k, k);
  out.topLeftCorner(j, j) = m.topLeftCorner(j, j);
  out.topRightCorner(j, tail) = m.topRightCorner(j, tail);
  out.bottomLeftCorner(tail, j) = m.bottomLeftCorner(tail, j);
  out.bottomRightCorner(tail, tail) = m.bottomRightCorner(tail, tail);
  return SymMatrix(std::move(out));
}

DataMatrix rank1_residual(const DataMatrix& x, const Vector& v) {
  if (v.size() != x.p()) {
    throw Error(ErrorKind::DimensionMismatch, "loading vector length differs from p");
  }
  detail::require_unit_norm(v, 1e-8);
  const Vector scores = x.values() * v;
  Matrix out = x.values();
  out.noalias() -= scores * v.transpose();
  return DataMatrix::trusted(std::move(out), x.centered());
}

double frobenius_sq(const Matrix& x) { return x.squaredNorm(); }

double frobenius_sq(const DataMatrix& x) { return frobenius_sq(x.values()); }

}  // namespace sparsepc
