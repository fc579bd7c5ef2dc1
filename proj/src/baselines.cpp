#include "sparsepc/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace sparsepc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double aligned_change(const Vector& next, const Vector& prev) {
  return next.dot(prev) < 0.0 ? (next + prev).norm() : (next - prev).norm();
}

void check_cardinality(const SymMatrix& cov, const CardinalityParams& params) {
  if (params.k < 1 || params.k > cov.dim()) {
    throw Error(ErrorKind::InvalidParameter,
                "cardinality k=" + std::to_string(params.k) + " outside [1, p]");
  }
}

Vector normalized_or_throw(Vector v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorKind::ZeroAfterTruncation, "truncated iterate is the zero vector");
  }
  return v / norm;
}

}  // namespace

Vector soft_threshold(const Vector& x, double delta) {
  if (delta < 0.0) throw Error(ErrorKind::InvalidParameter, "soft threshold needs delta >= 0");
  Vector out(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    const double mag = std::abs(x[j]) - delta;
    out[j] = mag > 0.0 ? std::copysign(mag, x[j]) : 0.0;
  }
  return out;
}

double l1_bound_threshold(const Vector& a, double c) {
  const double a_norm = a.norm();
  if (a_norm == 0.0 || a.lpNorm<1>() / a_norm <= c) return 0.0;

  // ||S(a,d)||_1 / ||S(a,d)||_2 is non-increasing in d and reaches 1 once a
  // single entry survives; an all-zero result only occurs at d = max|a|.
  auto within_bound = [&](double d) {
    const Vector s = soft_threshold(a, d);
    const double l2 = s.norm();
    return l2 == 0.0 || s.lpNorm<1>() / l2 <= c;
  };
  double lo = 0.0;
  double hi = a.cwiseAbs().maxCoeff();
  const double tol = 1e-13 * std::max(1.0, hi);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (within_bound(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Vector truncate_k(const Vector& x, int k) {
  const Index p = x.size();
  if (k < 1 || k > p) {
    throw Error(ErrorKind::InvalidParameter, "k = " + std::to_string(k) + " outside [1, p]");
  }
  if (k == p) return x;
  Vector out = Vector::Zero(p);
  std::vector<Index> idx(static_cast<size_t>(p));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [&x](Index l, Index r) {
    const double al = std::abs(x[l]);
    const double ar = std::abs(x[r]);
    return al != ar ? al > ar : l < r;
  };
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), before);
  for (int i = 0; i < k; ++i) out[idx[static_cast<size_t>(i)]] = x[idx[static_cast<size_t>(i)]];
  return out;
}

SparseComponent pca_first_pc(const SymMatrix& cov, const PowerOptions& opts) {
  const auto t0 = Clock::now();
  EigenPair pair = power_iteration(cov, opts);
  SparseComponent out = finalize_component(std::move(pair.vector), cov, Method::Pca);
  out.iterations = pair.iterations;
  out.converged = pair.converged;
  out.runtime = seconds_since(t0);
  return out;
}

SparseComponent spc_first_pc(const DataMatrix& x, const SpcParams& params) {
  const auto t0 = Clock::now();
  const double max_c = std::sqrt(static_cast<double>(x.p()));
  if (!(params.c >= 1.0 - 1e-12 && params.c <= max_c + 1e-12)) {
    throw Error(ErrorKind::InvalidParameter,
                "L1 bound c=" + std::to_string(params.c) + " outside [1, sqrt(p)]");
  }
  const SymMatrix cov = sample_covariance(x);
  const Matrix& xv = x.values();

  // Start from the leading right singular vector.
  Vector v = power_iteration(cov).vector;
  Vector u(x.n());
  bool converged = false;
  int it = 0;
  while (it < params.max_iter) {
    ++it;
    u.noalias() = xv * v;
    const double un = u.norm();
    if (un == 0.0) break;
    u /= un;

    const Vector a = xv.transpose() * u;
    const double delta = l1_bound_threshold(a, params.c);
    Vector next = soft_threshold(a, delta);
    const double nn = next.norm();
    if (nn == 0.0) {
      // Tied maxima at the c = 1 limit: keep the first of them.
      next = Vector::Zero(x.p());
      Index j = 0;
      a.cwiseAbs().maxCoeff(&j);
      next[j] = std::copysign(1.0, a[j]);
    } else {
      next /= nn;
    }
    const double change = (next - v).norm();
    v = std::move(next);
    if (change <= params.tol) {
      converged = true;
      break;
    }
  }

  SparseComponent out = finalize_component(std::move(v), cov, Method::Spc);
  out.param = params.c;
  out.iterations = it;
  out.converged = converged;
  out.runtime = seconds_since(t0);
  return out;
}

SparseComponent tpower_first_pc(const SymMatrix& cov, const CardinalityParams& params,
                                const std::optional<Vector>& v0,
                                std::vector<double>* rayleigh_trace) {
  const auto t0 = Clock::now();
  check_cardinality(cov, params);
  Vector v = v0 ? *v0 : power_iteration(cov).vector;
  if (v.size() != cov.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "start vector length differs from p");
  }
  if (!(v.norm() > 0.0)) throw Error(ErrorKind::InvalidParameter, "start vector is zero");
  v.normalize();

  const Matrix& m = cov.values();
  bool converged = false;
  int it = 0;
  Vector w(v.size());
  while (it < params.max_iter) {
    ++it;
    w.noalias() = m * v;
    Vector next = normalized_or_throw(truncate_k(w, params.k));
    const double change = aligned_change(next, v);
    v = std::move(next);
    if (rayleigh_trace) rayleigh_trace->push_back(v.dot(m * v));
    if (change <= params.tol) {
      converged = true;
      break;
    }
  }

  SparseComponent out = finalize_component(std::move(v), cov, Method::TPower);
  out.param = params.k;
  out.iterations = it;
  out.converged = converged;
  out.runtime = seconds_since(t0);
  return out;
}

SparseComponent rifle_first_pc(const SymMatrix& cov, const CardinalityParams& params,
                               const Vector& v0, double eta) {
  const auto t0 = Clock::now();
  check_cardinality(cov, params);
  if (v0.size() != cov.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "start vector length differs from p");
  }
  const double step0 = eta > 0.0 ? eta : 0.01 * static_cast<double>(cov.dim());
  const Matrix& m = cov.values();

  Vector v = normalized_or_throw(truncate_k(v0, params.k));
  Vector av = m * v;
  double rho = v.dot(av);

  bool converged = false;
  int it = 0;
  while (it < params.max_iter) {
    ++it;
    if (!(rho > 0.0)) {
      throw Error(ErrorKind::ZeroAfterTruncation, "Rayleigh quotient is not positive");
    }
    double step = step0;
    Vector next;
    Vector next_av;
    double next_rho = 0.0;
    for (int halving = 0; halving < 40; ++halving) {
      next = normalized_or_throw(truncate_k(v + (step / rho) * av, params.k));
      next_av.noalias() = m * next;
      next_rho = next.dot(next_av);
      if (next_rho >= rho - 1e-12 * std::abs(rho)) break;
      step *= 0.5;
    }
    const double change = aligned_change(next, v);
    v = std::move(next);
    av = std::move(next_av);
    rho = next_rho;
    if (change <= params.tol) {
      converged = true;
      break;
    }
  }

  SparseComponent out = finalize_component(std::move(v), cov, Method::Rifle);
  out.param = params.k;
  out.iterations = it;
  out.converged = converged;
  out.runtime = seconds_since(t0);
  return out;
}

SparseComponent fit_first_pc(Method method, const DataMatrix& x, double param) {
  const auto t0 = Clock::now();
  SparseComponent out;
  switch (method) {
    case Method::Pca:
      out = pca_first_pc(sample_covariance(x));
      break;
    case Method::Eespca:
      out = eespca_first_pc(sample_covariance(x));
      break;
    case Method::Spc:
    case Method::Spc1se: {
      SpcParams sp;
      sp.c = param;
      out = spc_first_pc(x, sp);
      out.method = method;
      break;
    }
    case Method::TPower: {
      CardinalityParams cp;
      cp.k = static_cast<int>(std::lround(param));
      out = tpower_first_pc(sample_covariance(x), cp);
      break;
    }
    case Method::Rifle: {
      CardinalityParams cp;
      cp.k = static_cast<int>(std::lround(param));
      const SymMatrix cov = sample_covariance(x);
      out = rifle_first_pc(cov, cp, power_iteration(cov).vector);
      break;
    }
  }
  out.runtime = seconds_since(t0);
  return out;
}

std::vector<SparseComponent> multi_pc(Method method, const DataMatrix& x, int k_components,
                                      const std::vector<double>& params) {
  const bool needs_param = method != Method::Pca && method != Method::Eespca;
  if (needs_param && params.size() != 1 && params.size() != static_cast<size_t>(k_components)) {
    throw Error(ErrorKind::InvalidParameter, "need one sparsity parameter per component");
  }
  return deflate_components(x, k_components, [&](const DataMatrix& residual, int index) {
    const double param =
        needs_param ? params[params.size() == 1 ? 0 : static_cast<size_t>(index)] : 0.0;
    return fit_first_pc(method, residual, param);
  });
}

}  // namespace sparsepc
