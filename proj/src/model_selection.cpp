#include "sparsepc/model_selection.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparsepc/rng.hpp"

namespace sparsepc {

namespace {

constexpr int kGridLength = 20;

std::vector<double> even_sequence(double from, double to, int length) {
  std::vector<double> out(static_cast<size_t>(length));
  for (int i = 0; i < length; ++i) {
    out[static_cast<size_t>(i)] = from + (to - from) * static_cast<double>(i) / (length - 1);
  }
  out.back() = to;
  return out;
}

bool is_cardinality_method(Method m) { return m == Method::TPower || m == Method::Rifle; }
bool is_l1_method(Method m) { return m == Method::Spc || m == Method::Spc1se; }

Matrix select_rows(const Matrix& m, const std::vector<int>& folds, int fold, bool inside) {
  Index count = 0;
  for (int f : folds) count += ((f == fold) == inside);
  Matrix out(count, m.cols());
  Index r = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    if ((folds[static_cast<size_t>(i)] == fold) == inside) out.row(r++) = m.row(i);
  }
  return out;
}

}  // namespace

CvGrid CvGrid::l1_bound(Index p) {
  CvGrid g;
  g.kind = GridKind::L1Bound;
  g.values = even_sequence(1.0, std::sqrt(static_cast<double>(p)), kGridLength);
  return g;
}

CvGrid CvGrid::cardinality(Index p) {
  CvGrid g;
  g.kind = GridKind::Cardinality;
  for (double v : even_sequence(1.0, static_cast<double>(p), kGridLength)) {
    // nearbyint under the default rounding mode rounds halves to even.
    const double k = std::nearbyint(v);
    if (g.values.empty() || g.values.back() != k) g.values.push_back(k);
  }
  return g;
}

CvGrid default_grid(Method method, Index p) {
  if (is_l1_method(method)) return CvGrid::l1_bound(p);
  if (is_cardinality_method(method)) return CvGrid::cardinality(p);
  throw Error(ErrorKind::InvalidParameter,
              std::string(method_name(method)) + " has no tuning parameter");
}

std::vector<int> make_folds(Index n, int nfolds, std::uint64_t seed) {
  if (nfolds < 2 || static_cast<Index>(nfolds) > n) {
    throw Error(ErrorKind::TooFewSamples,
                "cannot split " + std::to_string(n) + " samples into " + std::to_string(nfolds) +
                    " folds");
  }
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::vector<int> folds(static_cast<size_t>(n));
  for (size_t pos = 0; pos < order.size(); ++pos) {
    folds[static_cast<size_t>(order[pos])] = static_cast<int>(pos % static_cast<size_t>(nfolds));
  }
  return folds;
}

SparseComponent fit_training_fold(Method method, const DataMatrix& x, const std::vector<int>& folds,
                                  int fold, double param) {
  if (folds.size() != static_cast<size_t>(x.n())) {
    throw Error(ErrorKind::DimensionMismatch, "fold assignment length differs from n");
  }
  const DataMatrix train = mean_center(DataMatrix(select_rows(x.values(), folds, fold, false)));
  return fit_first_pc(method, train, param);
}

double holdout_error(const DataMatrix& x, const std::vector<int>& folds, int fold, const Vector& v) {
  const Matrix held = select_rows(x.values(), folds, fold, true);
  const Vector scores = held * v;
  Matrix residual = held;
  residual.noalias() -= scores * v.transpose();
  return frobenius_sq(residual);
}

void choose_parameters(CvResult& res) {
  const size_t m = res.grid.values.size();
  if (res.mean_error.size() != m || res.se_error.size() != m) {
    throw Error(ErrorKind::DimensionMismatch, "CV curve length differs from grid length");
  }
  size_t best = m;
  for (size_t c = 0; c < m; ++c) {
    if (!std::isfinite(res.mean_error[c])) continue;
    if (best == m || res.mean_error[c] < res.mean_error[best]) best = c;
  }
  if (best == m) {
    throw Error(ErrorKind::AllCellsFailed, "every CV candidate failed");
  }
  const double cutoff = res.mean_error[best] + res.se_error[best];
  size_t one_se = best;
  for (size_t c = 0; c < best; ++c) {
    if (res.mean_error[c] <= cutoff) {
      one_se = c;
      break;
    }
  }
  res.index_min = best;
  res.index_1se = one_se;
  res.chosen_min = res.grid.values[best];
  res.chosen_1se = res.grid.values[one_se];
}

CvResult cv_select(Method method, const DataMatrix& x, const CvGrid& grid, int nfolds,
                   std::uint64_t seed) {
  if (!x.centered()) throw Error(ErrorKind::NotCentered, "cross-validation needs centered data");
  const bool kind_ok = (grid.kind == GridKind::L1Bound && is_l1_method(method)) ||
                       (grid.kind == GridKind::Cardinality && is_cardinality_method(method));
  if (!kind_ok) {
    throw Error(ErrorKind::InvalidParameter,
                "grid kind does not match method " + std::string(method_name(method)));
  }
  if (grid.values.empty()) throw Error(ErrorKind::InvalidParameter, "empty CV grid");
  for (size_t c = 1; c < grid.values.size(); ++c) {
    if (!(grid.values[c - 1] < grid.values[c])) {
      throw Error(ErrorKind::InvalidParameter, "CV grid must be strictly ascending");
    }
  }

  const std::vector<int> folds = make_folds(x.n(), nfolds, seed);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  CvResult res;
  res.grid = grid;
  res.nfolds = nfolds;
  const size_t m = grid.values.size();
  res.fold_errors.assign(m, std::vector<double>(static_cast<size_t>(nfolds), kInf));
  res.mean_error.assign(m, kInf);
  res.se_error.assign(m, kInf);

  for (size_t c = 0; c < m; ++c) {
    for (int f = 0; f < nfolds; ++f) {
      try {
        const SparseComponent comp = fit_training_fold(method, x, folds, f, grid.values[c]);
        res.fold_errors[c][static_cast<size_t>(f)] = holdout_error(x, folds, f, comp.loadings);
      } catch (const Error&) {
        // Cell stays at +inf.
      }
    }
    const auto& errs = res.fold_errors[c];
    const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / nfolds;
    if (!std::isfinite(mean)) continue;
    double ss = 0.0;
    for (double e : errs) ss += (e - mean) * (e - mean);
    res.mean_error[c] = mean;
    res.se_error[c] = std::sqrt(ss / (nfolds - 1)) / std::sqrt(static_cast<double>(nfolds));
  }

  choose_parameters(res);
  return res;
}

}  // namespace sparsepc
