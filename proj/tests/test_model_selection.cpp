#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "sparsepc/model_selection.hpp"
#include "sparsepc/simulation.hpp"
#include "test_support.hpp"

using namespace sparsepc;

namespace {

CvResult curve(std::vector<double> grid, std::vector<double> mean, std::vector<double> se) {
  CvResult r;
  r.grid.values = std::move(grid);
  r.mean_error = std::move(mean);
  r.se_error = std::move(se);
  return r;
}

DataMatrix draw(std::uint64_t seed, Index n = 100) {
  return mean_center(mvn_sample(running_example_covariance(), n, seed));
}

}  // namespace

TEST_CASE("L1 bound grid") {
  const CvGrid g = CvGrid::l1_bound(10);
  REQUIRE(g.values.size() == 20);
  CHECK(g.kind == GridKind::L1Bound);
  CHECK(g.values.front() == 1.0);
  CHECK(g.values.back() == std::sqrt(10.0));
  CHECK(g.values[1] == doctest::Approx(1.11380409).epsilon(1e-8));
  CHECK(g.values[9] == doctest::Approx(2.02423679).epsilon(1e-8));
  CHECK(std::is_sorted(g.values.begin(), g.values.end()));
}

TEST_CASE("cardinality grid") {
  using V = std::vector<double>;
  CHECK(CvGrid::cardinality(5).values == V{1, 2, 3, 4, 5});
  CHECK(CvGrid::cardinality(10).values == V{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(CvGrid::cardinality(37).values ==
        V{1, 3, 5, 7, 9, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 29, 31, 33, 35, 37});
  CHECK(CvGrid::cardinality(100).values ==
        V{1, 6, 11, 17, 22, 27, 32, 37, 43, 48, 53, 58, 64, 69, 74, 79, 84, 90, 95, 100});
  CHECK(CvGrid::cardinality(10).kind == GridKind::Cardinality);
}

TEST_CASE("default grids") {
  CHECK(default_grid(Method::Spc, 10).kind == GridKind::L1Bound);
  CHECK(default_grid(Method::Spc1se, 10).kind == GridKind::L1Bound);
  CHECK(default_grid(Method::TPower, 10).kind == GridKind::Cardinality);
  CHECK(default_grid(Method::Rifle, 10).kind == GridKind::Cardinality);
  CHECK_THROWS_KIND(default_grid(Method::Eespca, 10), InvalidParameter);
  CHECK_THROWS_KIND(default_grid(Method::Pca, 10), InvalidParameter);
}

TEST_CASE("make_folds") {
  auto sizes = [](const std::vector<int>& folds, int k) {
    std::vector<int> s(static_cast<size_t>(k), 0);
    for (int f : folds) s[static_cast<size_t>(f)]++;
    std::sort(s.rbegin(), s.rend());
    return s;
  };
  CHECK(sizes(make_folds(10, 5, 1), 5) == std::vector<int>{2, 2, 2, 2, 2});
  CHECK(sizes(make_folds(11, 5, 1), 5) == std::vector<int>{3, 2, 2, 2, 2});
  CHECK(make_folds(50, 5, 7) == make_folds(50, 5, 7));
  CHECK(make_folds(50, 5, 7) != make_folds(50, 5, 8));
  CHECK_THROWS_KIND(make_folds(10, 1, 1), TooFewSamples);
  CHECK_THROWS_KIND(make_folds(4, 5, 1), TooFewSamples);
  CHECK_NOTHROW(make_folds(5, 5, 1));
}

TEST_CASE("choose_parameters") {
  SUBCASE("single candidate") {
    CvResult r = curve({3}, {1.0}, {0.5});
    choose_parameters(r);
    CHECK(r.chosen_min == 3);
    CHECK(r.chosen_1se == 3);
  }
  SUBCASE("zero standard error") {
    CvResult r = curve({1, 2, 3, 4}, {5.0, 4.0, 3.0, 3.5}, {0, 0, 0, 0});
    choose_parameters(r);
    CHECK(r.chosen_min == 3);
    CHECK(r.chosen_1se == 3);
  }
  SUBCASE("ties go to the sparser candidate") {
    CvResult r = curve({1, 2, 3}, {4.0, 2.0, 2.0}, {0, 0, 0});
    choose_parameters(r);
    CHECK(r.chosen_min == 2);
    CHECK(r.index_min == 1);
  }
  SUBCASE("one standard error rule") {
    CvResult r = curve({1, 2, 3, 4, 5}, {9.0, 5.1, 4.9, 4.0, 4.2}, {0.1, 0.1, 0.1, 1.0, 0.1});
    choose_parameters(r);
    CHECK(r.chosen_min == 4);
    CHECK(r.chosen_1se == 3);
    CHECK(r.index_1se == 2);
  }
  SUBCASE("failed cells are never chosen") {
    const double inf = INFINITY;
    CvResult r = curve({1, 2, 3}, {inf, 3.0, 2.0}, {inf, 0.5, 2.0});
    choose_parameters(r);
    CHECK(r.chosen_min == 3);
    CHECK(r.chosen_1se == 2);
  }
  SUBCASE("all cells failed") {
    CvResult r = curve({1, 2}, {INFINITY, INFINITY}, {INFINITY, INFINITY});
    CHECK_THROWS_KIND(choose_parameters(r), AllCellsFailed);
  }
  CvResult bad = curve({1, 2}, {1.0}, {0.0, 0.0});
  CHECK_THROWS_KIND(choose_parameters(bad), DimensionMismatch);
}

TEST_CASE("cv_select validation") {
  const DataMatrix x = draw(1, 30);
  CHECK_THROWS_KIND(cv_select(Method::TPower, DataMatrix(x.values().array() + 1.0), CvGrid::cardinality(10), 5, 1),
                    NotCentered);
  CHECK_THROWS_KIND(cv_select(Method::TPower, x, CvGrid::l1_bound(10), 5, 1), InvalidParameter);
  CHECK_THROWS_KIND(cv_select(Method::Spc, x, CvGrid::cardinality(10), 5, 1), InvalidParameter);
  CvGrid unsorted{{3, 2}, GridKind::Cardinality};
  CHECK_THROWS_KIND(cv_select(Method::TPower, x, unsorted, 5, 1), InvalidParameter);
  CvGrid empty{{}, GridKind::Cardinality};
  CHECK_THROWS_KIND(cv_select(Method::TPower, x, empty, 5, 1), InvalidParameter);
  CHECK_THROWS_KIND(cv_select(Method::TPower, x, CvGrid::cardinality(10), 31, 1), TooFewSamples);
}

TEST_CASE("cv_select on a single-value grid") {
  const DataMatrix x = draw(2);
  const CvResult r = cv_select(Method::TPower, x, CvGrid{{4}, GridKind::Cardinality}, 5, 9);
  CHECK(r.chosen_min == 4);
  CHECK(r.chosen_1se == 4);
  CHECK(r.mean_error.size() == 1);
  CHECK(r.fold_errors[0].size() == 5);
}

TEST_CASE("cv_select curve structure") {
  const DataMatrix x = draw(3);
  for (Method m : {Method::Spc, Method::TPower, Method::Rifle}) {
    CAPTURE(method_name(m));
    const CvResult r = cv_select(m, x, default_grid(m, 10), 5, 11);
    CHECK(r.mean_error.size() == r.grid.values.size());
    CHECK(r.se_error.size() == r.grid.values.size());
    CHECK(r.nfolds == 5);
    for (size_t c = 0; c < r.grid.values.size(); ++c) {
      CHECK(r.se_error[c] >= 0.0);
      double s = 0;
      for (double e : r.fold_errors[c]) s += e;
      CHECK(r.mean_error[c] == doctest::Approx(s / 5));
    }
    // One-SE choice is at least as sparse and satisfies the rule minimally.
    CHECK(r.index_1se <= r.index_min);
    const double cutoff = r.mean_error[r.index_min] + r.se_error[r.index_min];
    CHECK(r.mean_error[r.index_1se] <= cutoff);
    for (size_t c = 0; c < r.index_1se; ++c) CHECK(r.mean_error[c] > cutoff);
    CHECK(cv_select(m, x, default_grid(m, 10), 5, 11).mean_error == r.mean_error);
  }
}

TEST_CASE("property: held-out rows never influence the training fit") {
  const DataMatrix x = draw(4, 40);
  const std::vector<int> folds = make_folds(40, 5, 3);
  sparsepc::Rng rng(5);
  Matrix scrambled = x.values();
  for (Index i = 0; i < 40; ++i) {
    if (folds[static_cast<size_t>(i)] != 2) continue;
    for (Index j = 0; j < 10; ++j) scrambled(i, j) = 10.0 * rng.normal();
  }
  const DataMatrix y = DataMatrix::trusted(scrambled, true);
  for (Method m : {Method::Spc, Method::TPower, Method::Rifle}) {
    const double param = m == Method::Spc ? 2.0 : 4.0;
    CHECK(fit_training_fold(m, x, folds, 2, param).loadings == fit_training_fold(m, y, folds, 2, param).loadings);
  }
}

TEST_CASE("property: unconstrained candidates reproduce plain PCA held-out error") {
  const DataMatrix x = draw(5);
  const std::vector<int> folds = make_folds(100, 5, 21);
  for (int f = 0; f < 5; ++f) {
    const double pca = holdout_error(x, folds, f, fit_training_fold(Method::Pca, x, folds, f, 0).loadings);
    for (Method m : {Method::TPower, Method::Rifle}) {
      const double e = holdout_error(x, folds, f, fit_training_fold(m, x, folds, f, 10).loadings);
      CHECK(std::abs(e - pca) <= 1e-6);
    }
    const double spc = holdout_error(x, folds, f, fit_training_fold(Method::Spc, x, folds, f, std::sqrt(10.0)).loadings);
    CHECK(std::abs(spc - pca) <= 1e-6);
  }
}

TEST_CASE("holdout_error matches the direct residual") {
  const DataMatrix x = draw(6, 20);
  const std::vector<int> folds = make_folds(20, 4, 2);
  const Vector v = Vector::Unit(10, 3);
  double direct = 0.0;
  for (Index i = 0; i < 20; ++i) {
    if (folds[static_cast<size_t>(i)] != 1) continue;
    for (Index j = 0; j < 10; ++j) {
      if (j != 3) direct += x.values()(i, j) * x.values()(i, j);
    }
  }
  CHECK(holdout_error(x, folds, 1, v) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("tpower cross-validation concentrates near the true cardinality") {
  std::map<double, int> counts;
  for (int rep = 0; rep < 50; ++rep) {
    const DataMatrix x = draw(derive_seed({404, static_cast<std::uint64_t>(rep)}));
    const CvResult r = cv_select(Method::TPower, x, CvGrid::cardinality(10), 5, derive_seed({405, std::uint64_t(rep)}));
    counts[r.chosen_min]++;
  }
  const auto mode = std::max_element(counts.begin(), counts.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(mode->first >= 3);
  CHECK(mode->first <= 6);
}
