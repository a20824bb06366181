#include <gtest/gtest.h>

#include <cmath>

#include "covwig/core.hpp"
#include "covwig/errors.hpp"

using namespace covwig;

namespace {

// Independent oracle: largest M with M(M+1)/2 <= N via the quadratic formula.
int order_by_formula(int N) {
  return static_cast<int>(std::floor((std::sqrt(1.0 + 8.0 * N) - 1.0) / 2.0 + 1e-12));
}

ExponentPoint sc(double a, double b, double g) { return {a, b, g}; }

}  // namespace

TEST(CanonicalMap, ShiftsBetaByHalfGamma) {
  const ExponentPoint p1 = canonical_map(sc(0.5, -0.25, 1.0));
  EXPECT_DOUBLE_EQ(p1.alpha, 0.5);
  EXPECT_DOUBLE_EQ(p1.beta, 0.25);
  EXPECT_FALSE(p1.gamma.has_value());

  const ExponentPoint p2 = canonical_map(sc(0.3, -1.0, 2.0));
  EXPECT_DOUBLE_EQ(p2.alpha, 0.3);
  EXPECT_DOUBLE_EQ(p2.beta, 0.0);

  const ExponentPoint p3 = canonical_map(sc(0.5, 0.0, 3.0));
  EXPECT_DOUBLE_EQ(p3.beta, 1.5);
}

TEST(CanonicalMap, RejectsInvalidPoints) {
  EXPECT_THROW(canonical_map(sc(0.0, 0.0, 1.0)), DomainError);
  EXPECT_THROW(canonical_map(sc(1.0, 0.0, 1.0)), DomainError);
  EXPECT_THROW(canonical_map(sc(0.5, 0.0, 0.5)), DomainError);
  EXPECT_THROW(canonical_map(ExponentPoint{0.5, 0.0, std::nullopt}), DomainError);
}

TEST(Thresholds, TableValues) {
  const Thresholds t = thresholds(100, 10, 10000);
  EXPECT_NEAR(t.theta_comp, 0.1, 1e-15);
  EXPECT_NEAR(t.lambda_comp, 10.0, 1e-15);
  EXPECT_NEAR(t.theta_stat, 0.0316227766016838, 1e-15);
  EXPECT_NEAR(t.lambda_stat, std::sqrt(10.0), 1e-15);

  const Thresholds one = thresholds(1, 1, 1);
  EXPECT_DOUBLE_EQ(one.theta_comp, 1.0);
  EXPECT_DOUBLE_EQ(one.theta_stat, 1.0);
  EXPECT_DOUBLE_EQ(one.lambda_comp, 1.0);
  EXPECT_DOUBLE_EQ(one.lambda_stat, 1.0);
}

TEST(Thresholds, DomainErrors) {
  EXPECT_THROW(thresholds(10, 0, 10), DomainError);
  EXPECT_THROW(thresholds(10, 11, 20), DomainError);
  EXPECT_THROW(thresholds(10, 5, 9), DomainError);
}

TEST(Thresholds, StatBelowCompAndPiecewiseBranches) {
  for (int d : {4, 16, 64, 100}) {
    for (int k = 1; k <= d; ++k) {
      for (int n : {d, 4 * d, d * d}) {
        const Thresholds t = thresholds(d, k, n);
        EXPECT_LE(t.theta_stat, t.theta_comp + 1e-15);
        EXPECT_LE(t.lambda_stat, t.lambda_comp + 1e-15);
        const double rn = std::sqrt(static_cast<double>(n));
        if (k * k <= d) {
          EXPECT_NEAR(t.theta_comp, k / rn, 1e-15);
        } else {
          EXPECT_NEAR(t.theta_comp, std::sqrt(static_cast<double>(d) / n), 1e-15);
        }
      }
    }
  }
  // Both branches agree at k = sqrt(d).
  const Thresholds t = thresholds(64, 8, 1000);
  EXPECT_NEAR(t.theta_comp, 8.0 / std::sqrt(1000.0), 1e-15);
  EXPECT_NEAR(t.theta_comp, std::sqrt(64.0 / 1000.0), 1e-15);
}

TEST(ClassifyRegion, HandEvaluatedPoints) {
  EXPECT_EQ(classify_region(sc(0.5, -0.3, 1.0)), Region::Impossible);
  EXPECT_EQ(classify_region(sc(0.5, -0.1, 1.0)), Region::Hard);
  EXPECT_EQ(classify_region(sc(0.5, 0.1, 1.0)), Region::Easy);
}

TEST(ClassifyRegion, BoundaryPointsGoToClosedSide) {
  EXPECT_EQ(classify_region(sc(0.5, 0.0, 1.0)), Region::Easy);
  EXPECT_EQ(classify_region(sc(0.5, -0.25, 1.0)), Region::Impossible);
  EXPECT_EQ(classify_region(ExponentPoint{0.4, 0.4, std::nullopt}), Region::Easy);
  EXPECT_EQ(classify_region(ExponentPoint{0.4, 0.2, std::nullopt}), Region::Impossible);
  EXPECT_EQ(classify_region(ExponentPoint{0.4, 0.3, std::nullopt}), Region::Hard);
}

TEST(ClassifyRegion, CanonicalMapCommutesWithBoundaries) {
  for (double a = 0.05; a < 1.0; a += 0.05) {
    for (double g = 1.0; g <= 4.0; g += 0.25) {
      const ExponentPoint mu = sc(a, 0.0, g);
      const ExponentPoint nu = canonical_map(mu);
      EXPECT_NEAR(beta_comp(mu) + g / 2.0, std::min(a, 0.5), 1e-12);
      EXPECT_NEAR(beta_comp(mu) + g / 2.0, beta_comp(nu), 1e-12);
      EXPECT_NEAR(beta_stat(mu) + g / 2.0, beta_stat(nu), 1e-12);
      for (double b = -2.0; b <= 1.0; b += 0.1) {
        // Exact boundary ties depend on rounding of b + g/2; skip them.
        if (std::abs(b - beta_comp(mu)) < 1e-9 || std::abs(b - beta_stat(mu)) < 1e-9) continue;
        EXPECT_EQ(classify_region(sc(a, b, g)), classify_region(canonical_map(sc(a, b, g))));
      }
    }
  }
}

TEST(DeriveConstants, WorkedExamples) {
  const DerivedConstants c1 = derive_constants(0.5, 0.5, 0.0, 512, 8);
  EXPECT_DOUBLE_EQ(c1.A, 2.0);
  EXPECT_EQ(c1.K, 14);
  EXPECT_EQ(c1.C, 64);
  EXPECT_EQ(c1.M, 4);

  const DerivedConstants c2 = derive_constants(0.25, 1.0, 0.0, 512, 8);
  EXPECT_DOUBLE_EQ(c2.A, 0.5);
  EXPECT_EQ(c2.K, 6);
  EXPECT_EQ(c2.C, 32);
  EXPECT_EQ(c2.M, 3);

  const DerivedConstants c3 = derive_constants(0.5, 0.5, 0.3186, 512, 8);
  const double psi = 0.3186 * 0.3186 * 512.0 / (2.0 * 64.0 * 64.0);
  EXPECT_NEAR(c3.psi, psi, 1e-15);
  EXPECT_NEAR(c3.psi, 0.00634, 5e-6);
  EXPECT_LE(c3.psi, 0.25);
}

TEST(DeriveConstants, MatchesIndependentFormulas) {
  for (double alpha : {0.05, 0.1, 0.25, 0.4, 0.5}) {
    for (double eps : {0.1, 0.25, 0.5, 1.0, 2.0}) {
      const DerivedConstants c = derive_constants(alpha, eps, 0.0, 100, 3);
      const double A = std::max(2.0 * alpha / eps, 4.0 * alpha / (1.0 + eps));
      const int K = static_cast<int>(std::ceil(A * A + 3.0 * A + 4.0));
      const int C = static_cast<int>(std::lround(std::pow(2.0, std::ceil(std::log2(2.0 * K)) + 1.0)));
      EXPECT_DOUBLE_EQ(c.A, A);
      EXPECT_EQ(c.K, K);
      EXPECT_EQ(c.C, C);
      EXPECT_EQ(c.M, order_by_formula(K));
      EXPECT_EQ(c.psi, 0.0);
    }
  }
}

TEST(DeriveConstants, RejectsLargePsi) {
  // 1/M = 1/4; psi = theta^2 n / (2 C k^2) with C = 64, n = 512, k = 1.
  EXPECT_THROW(derive_constants(0.5, 0.5, 1.0, 512, 1), PsiRangeError);
  EXPECT_THROW(derive_constants(0.5, 0.0, 0.1, 512, 8), DomainError);
  EXPECT_THROW(derive_constants(0.6, 0.5, 0.1, 512, 8), DomainError);
  EXPECT_THROW(derive_constants(0.5, 0.5, -0.1, 512, 8), DomainError);
}

TEST(DenoiseOrder, MatchesQuadraticFormula) {
  for (int N = 1; N <= 5000; ++N) EXPECT_EQ(denoise_order(N), order_by_formula(N)) << N;
  EXPECT_EQ(denoise_order(1), 1);
  EXPECT_EQ(denoise_order(3), 2);
  EXPECT_EQ(denoise_order(14), 4);
  EXPECT_EQ(denoise_order(15), 5);
  EXPECT_THROW(denoise_order(0), PreconditionError);
}

TEST(CeilLog2, SmallValues) {
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(3), 2);
  EXPECT_EQ(ceil_log2(28), 5);
  EXPECT_EQ(ceil_log2(32), 5);
  EXPECT_EQ(ceil_log2(33), 6);
}

TEST(Params, Validation) {
  EXPECT_NO_THROW((ScParams{10, 3, 0.0, 10}.validate()));
  EXPECT_THROW((ScParams{10, 0, 0.0, 10}.validate()), DomainError);
  EXPECT_THROW((ScParams{10, 3, -1.0, 10}.validate()), DomainError);
  EXPECT_THROW((ScParams{10, 3, 0.0, 9}.validate()), DomainError);
  EXPECT_THROW((WigParams{5, 6, 1.0}.validate()), DomainError);
  EXPECT_THROW((WigParams{5, 2, -1.0}.validate()), DomainError);
}
