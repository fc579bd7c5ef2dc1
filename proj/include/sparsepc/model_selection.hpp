#pragma once

#include <cstdint>
#include <vector>

#include "sparsepc/baselines.hpp"
#include "sparsepc/eespca.hpp"

namespace sparsepc {

enum class GridKind { L1Bound, Cardinality };

struct CvGrid {
  std::vector<double> values;  // ascending; lower = sparser
  GridKind kind = GridKind::Cardinality;

  /// 20 evenly spaced L1 bounds from 1 to sqrt(p).
  static CvGrid l1_bound(Index p);
  /// round(seq(1, p, length 20)), deduplicated.
  static CvGrid cardinality(Index p);
};

/// The grid a method is tuned over (SPC variants: L1 bound; TPower and
/// rifle: cardinality).
CvGrid default_grid(Method method, Index p);

struct CvResult {
  CvGrid grid;
  std::vector<double> mean_error;
  std::vector<double> se_error;
  std::vector<std::vector<double>> fold_errors;  // [candidate][fold]
  double chosen_min = 0.0;
  double chosen_1se = 0.0;
  size_t index_min = 0;
  size_t index_1se = 0;
  int nfolds = 0;
};

/// Fold index in [0, nfolds) for each of n samples; fold sizes differ by at
/// most one and the assignment is a seeded shuffle.
std::vector<int> make_folds(Index n, int nfolds, std::uint64_t seed);

/// First PC fitted on the rows outside `fold` (re-centered on those rows).
SparseComponent fit_training_fold(Method method, const DataMatrix& x, const std::vector<int>& folds,
                                  int fold, double param);

/// ||X_f - (X_f v) v^T||_F^2 over the rows of `fold`.
double holdout_error(const DataMatrix& x, const std::vector<int>& folds, int fold, const Vector& v);

/// Fills chosen_min (lowest mean error, earlier = sparser candidate on ties)
/// and chosen_1se (first candidate within one standard error of it) from the
/// curve already stored in `res`.
void choose_parameters(CvResult& res);

/// Row-holdout cross-validation of `method` over `grid`. Failed cells get
/// +inf error and are never chosen; AllCellsFailed if nothing succeeds.
CvResult cv_select(Method method, const DataMatrix& x, const CvGrid& grid, int nfolds,
                   std::uint64_t seed);

}  // namespace sparsepc
