#include "sparsepc/eespca.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace sparsepc {

namespace {

constexpr std::string_view kMethodNames[] = {"pca", "eespca", "spc", "spc1se", "tpower", "rifle"};

Index argmax_abs(const Vector& v) {
  Index best = 0;
  v.cwiseAbs().maxCoeff(&best);
  return best;
}

}  // namespace

std::string_view method_name(Method m) noexcept { return kMethodNames[static_cast<int>(m)]; }

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (int i = 0; i < 6; ++i) {
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  }
  return std::nullopt;
}

SparseComponent finalize_component(Vector loadings, const SymMatrix& cov, Method method) {
  canonicalize_sign(loadings);
  SparseComponent out;
  for (Index j = 0; j < loadings.size(); ++j) {
    if (loadings[j] != 0.0) out.support.push_back(j);
  }
  out.eigenvalue = loadings.dot(cov.values() * loadings);
  out.loadings = std::move(loadings);
  out.method = method;
  return out;
}

SparseComponent eespca_first_pc(const SymMatrix& cov, const EespcaOptions& opts, EespcaTrace* trace) {
  const auto t0 = std::chrono::steady_clock::now();
  const Index p = cov.dim();
  if (p < 2) throw Error(ErrorKind::InvalidParameter, "EESPCA needs p >= 2");

  EigenPair principal = power_iteration(cov, opts.power);
  if (!(principal.value > 0.0)) {
    throw Error(ErrorKind::PowerIterationDegenerate,
                "principal eigenvalue " + std::to_string(principal.value) + " is not positive");
  }
  const Vector& v1 = principal.vector;

  Vector sub = submatrix_top_eigenvalues(cov, v1, opts.submatrix);
  SquaredLoadings approx = approx_squared_loadings(cov, principal.value, sub);
  LoadingRatios ratios = loading_ratios(approx, v1);

  Vector scaled = ratios.values.cwiseProduct(v1);
  bool guard = false;
  const double scaled_norm = scaled.norm();
  if (scaled_norm > 0.0) {
    scaled /= scaled_norm;
  } else {
    scaled = Vector::Zero(p);
    scaled[argmax_abs(v1)] = 1.0;
    guard = true;
  }

  const double threshold = 1.0 / std::sqrt(static_cast<double>(p));
  Vector sparse = scaled;
  for (Index j = 0; j < p; ++j) {
    if (std::abs(sparse[j]) < threshold) sparse[j] = 0.0;
  }
  const double sparse_norm = sparse.norm();
  if (sparse_norm > 0.0) {
    sparse /= sparse_norm;
  } else {
    sparse = Vector::Zero(p);
    sparse[argmax_abs(scaled)] = 1.0;
    guard = true;
  }

  SparseComponent out = finalize_component(std::move(sparse), cov, Method::Eespca);
  out.iterations = principal.iterations;
  out.converged = principal.converged;
  out.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (trace) {
    trace->principal = std::move(principal);
    trace->sub_lambda1 = std::move(sub);
    trace->approx = std::move(approx);
    trace->ratios = std::move(ratios);
    trace->scaled = std::move(scaled);
    trace->threshold = threshold;
    trace->support_guard_used = guard;
  }
  return out;
}

std::vector<SparseComponent> deflate_components(const DataMatrix& x, int k, const ComponentFit& fit) {
  if (!x.centered()) {
    throw Error(ErrorKind::NotCentered, "multi-component fits require a centered matrix");
  }
  const Index limit = std::min(x.n(), x.p());
  if (k < 1 || k >= limit) {
    throw Error(ErrorKind::InvalidParameter,
                "component count " + std::to_string(k) + " outside [1, min(n,p))");
  }
  const double total = frobenius_sq(x);
  std::vector<SparseComponent> out;
  out.reserve(static_cast<size_t>(k));
  DataMatrix residual = x;
  for (int c = 0; c < k; ++c) {
    if (c > 0 && frobenius_sq(residual) <= 1e-24 * total) {
      throw Error(ErrorKind::RankExhausted,
                  "residual is numerically zero after " + std::to_string(c) + " component(s)");
    }
    SparseComponent comp = fit(residual, c);
    residual = rank1_residual(residual, comp.loadings);
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<SparseComponent> eespca_multi(const DataMatrix& x, int k, const EespcaOptions& opts) {
  return deflate_components(x, k, [&opts](const DataMatrix& residual, int) {
    return eespca_first_pc(sample_covariance(residual), opts);
  });
}

double reconstruction_error(const DataMatrix& x, const std::vector<SparseComponent>& components) {
  Matrix residual = x.values();
  for (const auto& comp : components) {
    if (comp.loadings.size() != x.p()) {
      throw Error(ErrorKind::DimensionMismatch, "component length differs from p");
    }
    detail::require_unit_norm(comp.loadings, 1e-8);
    const Vector scores = residual * comp.loadings;
    residual.noalias() -= scores * comp.loadings.transpose();
  }
  return frobenius_sq(residual);
}

}  // namespace sparsepc
