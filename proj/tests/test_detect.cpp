#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "covwig/detect.hpp"
#include "covwig/errors.hpp"
#include "covwig/verify.hpp"

using namespace covwig;

namespace {

// Empirical (1 - q) quantile, used to tune c on held-out null runs.
double upper(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const auto idx = static_cast<std::size_t>(std::ceil((1.0 - q) * xs.size())) - 1;
  return xs[std::min(idx, xs.size() - 1)];
}

}  // namespace

TEST(ThresholdDetect, NoiselessSpikeHitsOneOverK) {
  const int d = 20;
  const int k = 4;
  Rng rng = SeedStream(1).rng();
  const Vector u = sample_sparse_signal(d, k, rng).dense();
  const Matrix y = static_cast<double>(k) * u * u.transpose();
  const DetectorOutcome o = threshold_detect_wig(y, k, 0.1);
  EXPECT_NEAR(o.statistic, 1.0, 1e-15);
  EXPECT_EQ(o.decision, Decision::Planted);
  EXPECT_NEAR(o.threshold, 0.1 * std::sqrt(std::log(20.0)), 1e-15);
}

TEST(ThresholdDetect, DecisionIsStrictInequality) {
  Matrix y = Matrix::Zero(3, 3);
  y(0, 1) = y(1, 0) = std::sqrt(std::log(3.0));
  EXPECT_EQ(threshold_detect_wig(y, 1, 1.0).decision, Decision::Null);
  EXPECT_EQ(threshold_detect_wig(y, 1, 0.999).decision, Decision::Planted);
}

TEST(ThresholdDetect, NullGoeMaximumBound) {
  const int d = 100;
  const int trials = 400;
  Rng rng = SeedStream(2).rng();
  const double bound = std::sqrt(2.0 * std::log(static_cast<double>(d) * d)) + 1.0;
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    if (threshold_detect_wig(sample_goe(d, rng), 1, 0.0).statistic <= bound) ++within;
  }
  EXPECT_GE(within / static_cast<double>(trials), 0.99);
}

TEST(ThresholdDetect, CalibratedErrorAtLargeLambda) {
  const int d = 64;
  const int k = 8;
  const SeedStream root(3);
  std::vector<double> held_out;
  Rng cal = root.child(0).rng();
  for (int t = 0; t < 400; ++t) held_out.push_back(threshold_detect_wig(sample_goe(d, cal), k, 0.0).statistic);
  const double c = upper(held_out, 0.02) / std::sqrt(std::log(static_cast<double>(d)));

  Rng rng = root.child(1).rng();
  int errors = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const bool planted = t % 2 == 1;
    const WigSample s = sample_wig({d, k, planted ? 4.0 * k : 0.0}, rng);
    const bool said_planted = threshold_detect_wig(s.data, k, c).decision == Decision::Planted;
    errors += said_planted != planted ? 1 : 0;
  }
  EXPECT_LE(errors / static_cast<double>(trials), 0.05);
}

TEST(SpectralDetect, NullEdgeNearTwo) {
  const int d = 200;
  const int trials = 100;
  Rng rng = SeedStream(4).rng();
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    const double s = spectral_detect_wig(sample_goe(d, rng), 0.5).statistic;
    within += std::abs(s - 2.0) <= 0.3 ? 1 : 0;
  }
  EXPECT_GE(within / static_cast<double>(trials), 0.95);
}

TEST(SpectralDetect, BbpLocation) {
  const int d = 200;
  const int trials = 100;
  const double lambda = 3.0 * std::sqrt(static_cast<double>(d));
  const double target = 3.0 + 1.0 / 3.0 - 0.2;
  Rng rng = SeedStream(5).rng();
  int above = 0;
  for (int t = 0; t < trials; ++t) {
    const WigSample s = sample_wig({d, 10, lambda}, rng);
    const DetectorOutcome o = spectral_detect_wig(s.data, 0.5);
    above += o.statistic >= target ? 1 : 0;
    EXPECT_EQ(o.decision, Decision::Planted);
  }
  EXPECT_GE(above / static_cast<double>(trials), 0.95);
}

TEST(SpectralDetect, ScalarCase) {
  Matrix y(1, 1);
  y << -0.7;
  const DetectorOutcome o = spectral_detect_wig(y, 0.0);
  EXPECT_DOUBLE_EQ(o.statistic, -0.7);
  EXPECT_DOUBLE_EQ(o.threshold, 2.0);
}

TEST(CovarianceDetect, SingleZeroRow) {
  const DetectorOutcome o = covariance_detect_sc(Matrix::Zero(1, 3), 1, 0.1);
  EXPECT_EQ(o.statistic, 0.0);
  EXPECT_EQ(o.decision, Decision::Null);
  EXPECT_THROW(covariance_detect_sc(Matrix::Zero(0, 3), 1, 0.1), PreconditionError);
}

TEST(CovarianceDetect, RescaledCovarianceFormula) {
  Rng rng = SeedStream(6).rng();
  const Matrix z = rng.normal_matrix(9, 4);
  Matrix expected = z.transpose() * z / 9.0 - Matrix::Identity(4, 4);
  expected *= 3.0;
  EXPECT_LE((rescaled_covariance(z) - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(CovarianceDetect, NullConcentrationAndCalibratedPower) {
  const int d = 50;
  const int n = 2500;
  const int k = 5;
  const SeedStream root(7);
  std::vector<double> null_stats;
  Rng cal = root.child(0).rng();
  for (int t = 0; t < 200; ++t) null_stats.push_back(covariance_detect_sc(cal.normal_matrix(n, d), k, 0.0).statistic);
  double mean = 0.0;
  for (double s : null_stats) mean += s;
  mean /= static_cast<double>(null_stats.size());
  // Maximum of d(d-1)/2 near-standard normals sits slightly below sqrt(4 ln d).
  EXPECT_NEAR(mean, std::sqrt(4.0 * std::log(static_cast<double>(d))), 0.6);
  const double c = upper(null_stats, 0.02) / std::sqrt(std::log(static_cast<double>(d)));

  Rng held = root.child(1).rng();
  int false_pos = 0;
  for (int t = 0; t < 200; ++t) {
    false_pos += covariance_detect_sc(held.normal_matrix(n, d), k, c).decision == Decision::Planted ? 1 : 0;
  }
  EXPECT_LE(false_pos / 200.0, 0.05);

  const double theta = 4.0 * k / std::sqrt(static_cast<double>(n));
  Rng rng = root.child(2).rng();
  int hits = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const ScSample s = sample_sc({d, k, theta, n}, false, rng);
    hits += covariance_detect_sc(s.data, k, c).decision == Decision::Planted ? 1 : 0;
  }
  EXPECT_GE(hits / static_cast<double>(trials), 0.95);
}

TEST(RecoverTopk, ExactRankOne) {
  Rng rng = SeedStream(8).rng();
  const SparseSignal u = sample_sparse_signal(30, 5, rng);
  const Vector v = u.dense();
  const RecoveryEstimate e = recover_topk(v * v.transpose(), 5);
  EXPECT_NEAR(e.u_hat.norm(), 1.0, 1e-12);
  EXPECT_LE((e.u_hat.array() != 0.0).count(), 5);
  EXPECT_NEAR(loss(u, e.u_hat), 0.0, 1e-12);
  EXPECT_THROW(recover_topk(v * v.transpose(), 31), PreconditionError);
}

TEST(RecoverTopk, PlantedWignerRecovery) {
  const int d = 64;
  const int k = 8;
  const double lambda = 4.0 * std::sqrt(static_cast<double>(d));
  Rng rng = SeedStream(9).rng();
  double total = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const WigSample s = sample_wig({d, k, lambda}, rng);
    const RecoveryEstimate e = recover_topk(s.data, k);
    ASSERT_NEAR(e.u_hat.norm(), 1.0, 1e-12);
    ASSERT_LE((e.u_hat.array() != 0.0).count(), k);
    total += loss(s.truth->u, e.u_hat);
  }
  EXPECT_LE(total / trials, 0.2);
}

TEST(RecoverTopk, NullOverlapNearOne) {
  // A random unit k-sparse direction has E<u, v>^2 of order k / d.
  const int d = 100;
  const int k = 5;
  Rng rng = SeedStream(10).rng();
  const SparseSignal u = sample_sparse_signal(d, k, rng);
  double total = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) total += loss(u, recover_topk(sample_goe(d, rng), k).u_hat);
  EXPECT_GE(total / trials, 1.0 - 3.0 * k / static_cast<double>(d));
}

TEST(Loss, AlgebraicCases) {
  Vector u = Vector::Zero(3);
  u[0] = 1.0;
  Vector v = Vector::Zero(3);
  v[1] = 1.0;
  EXPECT_EQ(loss(u, u), 0.0);
  EXPECT_EQ(loss(u, -u), 0.0);
  EXPECT_EQ(loss(u, v), 1.0);
  EXPECT_NEAR(loss(u, (u + v) / std::sqrt(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(loss(-u, (u + v) / std::sqrt(2.0)), 0.5, 1e-15);
  EXPECT_THROW(loss(u, 2.0 * v), DomainError);
  EXPECT_THROW(loss(u, Vector::Zero(2)), DomainError);
}

TEST(TopEigenpair, SignConventionAndValue) {
  Matrix y = Matrix::Zero(3, 3);
  y(2, 2) = 5.0;
  y(0, 0) = -9.0;
  const EigenPair p = top_eigenpair(y);
  EXPECT_DOUBLE_EQ(p.value, 5.0);
  EXPECT_NEAR(p.vector[2], 1.0, 1e-15);
  EXPECT_THROW(top_eigenpair(Matrix::Zero(2, 3)), PreconditionError);
}
