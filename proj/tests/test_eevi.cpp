#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sparsepc/eevi.hpp"
#include "sparsepc/simulation.hpp"
#include "test_support.hpp"

using namespace sparsepc;
using testutil::max_abs_diff;

namespace {

const Matrix& fixture6() {
  static const Matrix a = [] {
    Matrix m(6, 6);
    m << 4.0, 1.0, 0.5, 0.0, -0.3, 0.2,  //
        1.0, 3.0, 0.7, 0.1, 0.0, -0.4,   //
        0.5, 0.7, 2.5, 0.6, 0.2, 0.0,    //
        0.0, 0.1, 0.6, 2.0, 0.9, 0.3,    //
        -0.3, 0.0, 0.2, 0.9, 1.5, 0.5,   //
        0.2, -0.4, 0.0, 0.3, 0.5, 1.0;
    return m;
  }();
  return a;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vector exact_sub_tops(const SymMatrix& a) {
  Vector out(a.dim());
  for (Index j = 0; j < a.dim(); ++j) out[j] = exact_symmetric_eigen(principal_submatrix(a, j))[0].value;
  return out;
}

}  // namespace

TEST_CASE("exact identity examples") {
  SUBCASE("diagonal") {
    const SquaredLoadings s = exact_identity_squared_loadings(SymMatrix(Vector(vec({3, 2, 1})).asDiagonal()), 0);
    CHECK(s.kind == LoadingKind::Exact);
    CHECK(max_abs_diff(s.values, vec({1, 0, 0})) < 1e-12);
  }
  SUBCASE("two by two") {
    Matrix a(2, 2);
    a << 1, 0.5, 0.5, 1;
    const SquaredLoadings s = exact_identity_squared_loadings(SymMatrix(a), 0);
    CHECK(max_abs_diff(s.values, vec({0.5, 0.5})) < 1e-12);
  }
  SUBCASE("fixed 6x6 against frozen reference loadings") {
    // Squared eigenvector entries from an independent dense eigensolver.
    const Vector top = vec({5.9905133888284301e-01, 2.8415149302476633e-01, 1.0994052210859745e-01,
                            5.7557420258861876e-03, 9.3138530829444473e-04, 1.6951864961190107e-04});
    const Vector third = vec({0.2689949351686664, 0.4572285839727548, 0.02252806797312929,
                              0.07133381703001396, 0.04913421682830405, 0.13078037902713088});
    const SymMatrix a(fixture6());
    CHECK(max_abs_diff(exact_identity_squared_loadings(a, 0).values, top) < 1e-10);
    CHECK(max_abs_diff(exact_identity_squared_loadings(a, 2).values, third) < 1e-10);
  }
  SUBCASE("sums to one") {
    const SymMatrix a(fixture6());
    for (Index i = 0; i < 6; ++i) CHECK(std::abs(exact_identity_squared_loadings(a, i).values.sum() - 1.0) < 1e-8);
  }
}

TEST_CASE("exact identity errors") {
  CHECK_THROWS_KIND(exact_identity_squared_loadings(SymMatrix(Matrix::Identity(3, 3)), 0), DegenerateSpectrum);
  // Only the requested eigenvalue has to be simple.
  const SymMatrix d(Vector(vec({3, 1, 1})).asDiagonal());
  CHECK(max_abs_diff(exact_identity_squared_loadings(d, 0).values, vec({1, 0, 0})) < 1e-12);
  CHECK_THROWS_KIND(exact_identity_squared_loadings(d, 1), DegenerateSpectrum);
  CHECK_THROWS_KIND(exact_identity_squared_loadings(SymMatrix(Matrix::Identity(65, 65)), 0), DimensionTooLarge);
  CHECK_THROWS_KIND(exact_identity_squared_loadings(SymMatrix(fixture6()), 6), IndexOutOfRange);
}

TEST_CASE("property: identity oracle equivalence on random matrices") {
  sparsepc::Rng rng(2024);
  int done = 0;
  double worst = 0.0;
  while (done < 1000) {
    const Index p = 3 + static_cast<Index>(rng.below(6));
    const Matrix a = testutil::random_symmetric(rng, p);
    if (testutil::min_gap(a) < 1e-3) continue;
    ++done;
    const testutil::RefEigen ref = testutil::reference_eigen(a);
    const Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(p)));
    const SquaredLoadings s = exact_identity_squared_loadings(SymMatrix(a), i);
    worst = std::max(worst, max_abs_diff(s.values, ref.vectors.col(i).cwiseAbs2()));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("approximate squared loadings examples") {
  SUBCASE("population block covariance") {
    const SymMatrix sigma = block_covariance(10, 4, 0.5);
    const EigenPair top = power_iteration(sigma);
    const Vector sub = submatrix_top_eigenvalues(sigma, top.vector);
    const SquaredLoadings s = approx_squared_loadings(sigma, top.value, sub);
    Vector expect = Vector::Zero(10);
    expect.head(4).setConstant(0.2);
    CHECK(s.kind == LoadingKind::Approximate);
    CHECK(max_abs_diff(s.values, expect) < 1e-10);
    CHECK(std::abs(top.value - 2.5) < 1e-10);
  }
  SUBCASE("uncorrelated variable gets zero") {
    Matrix a = Matrix::Identity(3, 3);
    a(0, 1) = a(1, 0) = 0.4;
    a(2, 2) = 0.5;
    const SymMatrix s(a);
    const SquaredLoadings l = approx_squared_loadings(s, 1.4, exact_sub_tops(s));
    CHECK(l.values[2] == 0.0);
  }
  SUBCASE("two by two underestimates") {
    Matrix a(2, 2);
    a << 1, 0.5, 0.5, 1;
    const SymMatrix s(a);
    const SquaredLoadings l = approx_squared_loadings(s, 1.5, exact_sub_tops(s));
    CHECK(max_abs_diff(l.values, vec({1.0 / 3.0, 1.0 / 3.0})) < 1e-12);
    CHECK((l.values.array() <= 0.5).all());
  }
  SUBCASE("fixed 6x6 against frozen reference") {
    const Vector sub_ref = vec({3.694656670176142, 4.186228570427818, 4.641010868085491, 4.8971300316758235,
                                4.90863901761889, 4.910756515503686});
    const Vector approx_ref = vec({2.4773612725218896e-01, 1.4764786075577963e-01, 5.5050273744589484e-02,
                                   2.9022093675528104e-03, 5.5888085023247935e-04, 1.2774007003224508e-04});
    const SymMatrix a(fixture6());
    const EigenPair top = power_iteration(a);
    const Vector sub = submatrix_top_eigenvalues(a, top.vector);
    CHECK(max_abs_diff(sub, sub_ref) < 1e-9);
    CHECK(max_abs_diff(approx_squared_loadings(a, top.value, sub).values, approx_ref) < 1e-9);
    const Vector ratio_ref = vec({0.6430765164379179, 0.7208395523761759, 0.7076212133698134,
                                  0.7100905115919506, 0.7746310890162286, 0.8680701706718216});
    const LoadingRatios r = loading_ratios(approx_squared_loadings(a, top.value, sub), top.vector);
    CHECK(max_abs_diff(r.values, ratio_ref) < 1e-6);
  }
  const SymMatrix s(Matrix::Identity(3, 3));
  CHECK_THROWS_KIND(approx_squared_loadings(s, 0.0, Vector::Ones(3)), NonPositiveEigenvalue);
  CHECK_THROWS_KIND(approx_squared_loadings(s, -1.0, Vector::Ones(3)), NonPositiveEigenvalue);
  CHECK_THROWS_KIND(approx_squared_loadings(s, 1.0, Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("submatrix eigenvalues match the exact solver") {
  sparsepc::Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    const Index p = 3 + static_cast<Index>(rng.below(15));
    const SymMatrix a(testutil::random_psd(rng, p));
    const EigenPair top = power_iteration(a);
    PowerOptions tight;
    tight.tol = 1e-12;
    tight.max_iter = 100000;
    const Vector sub = submatrix_top_eigenvalues(a, top.vector, tight);
    CHECK(max_abs_diff(sub, exact_sub_tops(a)) <= 1e-8 * top.value);
  }
}

TEST_CASE("submatrix seed falls back when v1 is concentrated on one variable") {
  Matrix a = Matrix::Identity(3, 3);
  a(0, 0) = 5.0;
  a(1, 2) = a(2, 1) = 0.3;
  const SymMatrix s(a);
  const Vector sub = submatrix_top_eigenvalues(s, Vector(vec({1, 0, 0})));
  CHECK(std::abs(sub[0] - 1.3) < 1e-7);
  CHECK(std::abs(sub[1] - 5.0) < 1e-12);
}

TEST_CASE("loading ratios") {
  SUBCASE("exact squared loadings give unit ratios") {
    const testutil::RefEigen ref = testutil::reference_eigen(fixture6());
    SquaredLoadings exact{ref.vectors.col(0).cwiseAbs2(), LoadingKind::Approximate};
    const LoadingRatios r = loading_ratios(exact, ref.vectors.col(0));
    CHECK(max_abs_diff(r.values, Vector::Ones(6)) < 1e-12);
  }
  SUBCASE("zero approximation gives zero ratio") {
    SquaredLoadings s{vec({0.0, 0.5}), LoadingKind::Approximate};
    const LoadingRatios r = loading_ratios(s, vec({std::sqrt(0.5), std::sqrt(0.5)}));
    CHECK(r.values[0] == 0.0);
    CHECK(r.values[1] == doctest::Approx(1.0));
  }
  SUBCASE("vanishing denominator") {
    SquaredLoadings s{vec({0.1, 0.9}), LoadingKind::Approximate};
    const LoadingRatios r = loading_ratios(s, vec({1e-7, 1.0}));
    CHECK(r.values[0] == 0.0);
    CHECK(std::isfinite(r.values[1]));
  }
  CHECK_THROWS_KIND(loading_ratios(SquaredLoadings{Vector::Ones(2), LoadingKind::Approximate}, Vector::Ones(3)),
                    DimensionMismatch);
}

TEST_CASE("property: approximation bound on equicorrelated block models") {
  for (Index b = 2; b <= 6; ++b) {
    for (int r = 1; r <= 9; ++r) {
      const double rho = 0.1 * r;
      CAPTURE(b);
      CAPTURE(rho);
      const SymMatrix sigma = block_covariance(10, b, rho);
      const EigenPair top = power_iteration(sigma);
      const SquaredLoadings approx =
          approx_squared_loadings(sigma, top.value, submatrix_top_eigenvalues(sigma, top.vector));
      const Vector exact = top.vector.cwiseAbs2();
      CHECK((approx.values.array() <= exact.array() + 1e-10).all());
      CHECK(approx.values.tail(10 - b).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((approx.values.head(b).array() > 0.0).all());
    }
  }
}

TEST_CASE("property: pre-clamp approximation is non-negative and ratios stay below one") {
  sparsepc::Rng rng(555);
  for (int t = 0; t < 100; ++t) {
    const Index p = 2 + static_cast<Index>(rng.below(20));
    const SymMatrix a(testutil::random_psd(rng, p, p + 1 + static_cast<Index>(rng.below(30))));
    const EigenPair top = power_iteration(a);
    const Vector sub = submatrix_top_eigenvalues(a, top.vector);
    const Vector pre = Vector::Ones(p) - sub / top.value;
    CHECK(pre.minCoeff() >= -1e-8);
    const LoadingRatios r = loading_ratios(approx_squared_loadings(a, top.value, sub), top.vector);
    CHECK((r.values.array() >= 0.0).all());
    CHECK(r.values.maxCoeff() <= 1.0 + 1e-6);
  }
}

TEST_CASE("property: ratios separate block from noise variables on the running example") {
  const SymMatrix sigma = running_example_covariance();
  double block = 0.0;
  double noise = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const DataMatrix x = mean_center(mvn_sample(sigma, 100, derive_seed({31337, static_cast<std::uint64_t>(rep)})));
    const SymMatrix cov = sample_covariance(x);
    const EigenPair top = power_iteration(cov);
    const LoadingRatios r = loading_ratios(
        approx_squared_loadings(cov, top.value, submatrix_top_eigenvalues(cov, top.vector)), top.vector);
    block += r.values.head(4).mean();
    noise += r.values.tail(6).mean();
  }
  CHECK(block / 200 > noise / 200);
}

TEST_CASE("ratio samples tag block membership") {
  SimSpec spec;
  spec.reps = 3;
  const auto samples = loading_ratio_samples(spec, 9);
  REQUIRE(samples.size() == 30);
  double in = 0, out = 0;
  for (const auto& s : samples) {
    CHECK(s.in_block == (s.variable < 4));
    (s.in_block ? in : out) += s.ratio;
  }
  CHECK(in / 12 > out / 18);
}
