#pragma once

// Statistical verification harness. Total-variation closeness is never
// estimated directly; each stage contract is checked through marginal
// Kolmogorov-Smirnov tests, per-entry moment tests and dependence tests with
// Monte-Carlo error bounds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covwig/core.hpp"
#include "covwig/sampling.hpp"

namespace covwig {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  int trials = 0;
  std::uint64_t seed = 0;
  nlohmann::json details = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct NormalTarget {
  double mean = 0.0;
  double variance = 1.0;
};

double normal_cdf(double x);
/// Upper quantile: P(N(0,1) > z) = tail.
double normal_upper_quantile(double tail);

/// Two-sided one-sample KS statistic against `target`.
double ks_statistic(std::span<const double> samples, NormalTarget target);
/// Asymptotic Kolmogorov p-value with the Stephens finite-sample correction.
double ks_pvalue(double statistic, std::size_t n);
/// Smallest D rejected at `level` for n samples.
double ks_critical_value(double level, std::size_t n);

/// statistic = D, threshold = critical D at `level`; pass iff p >= level.
/// Needs at least 100 samples.
TestReport ks_normality(std::span<const double> samples, NormalTarget target,
                        double level = 0.01, std::string name = "ks_normality");

/// Predicted per-entry law for cross_moment_battery. A NaN variance entry
/// skips that entry's variance check.
struct MomentPrediction {
  Matrix mean;
  Matrix variance;
  bool symmetric = false;  // check only the upper triangle

  static MomentPrediction iid_null(Eigen::Index rows, Eigen::Index cols);
  /// GOE marginals: off-diagonal N(0,1), diagonal N(0,2).
  static MomentPrediction goe_null(int d);
  /// Mean scale * u u^T on a symmetric d x d matrix, variances unchecked.
  static MomentPrediction support_signal(const SparseSignal& u, double scale);
};

struct BatteryOptions {
  double level = 0.01;
  bool check_variances = true;
  bool check_correlations = true;  // random subsample of entry pairs
  int correlation_pairs = 64;
  /// Pooled correlation of squared standardized entries over all pairs of
  /// entries sharing an index (symmetric matrices only).
  bool check_second_order = true;
};

/// Per-entry means and variances, a random subsample of pairwise entry
/// correlations, and the pooled second-order correlation, each against the
/// prediction with Monte-Carlo z-bounds: max(3, Bonferroni quantile) per
/// check family. statistic = worst |z| / critical over all families,
/// threshold = 1.
TestReport cross_moment_battery(const std::vector<Matrix>& trials,
                                const MomentPrediction& prediction,
                                const BatteryOptions& options, Rng& pair_rng,
                                std::string name = "cross_moment_battery");

/// Exact E[denoise output] for iid Rad(a + delta) inputs by enumerating all
/// 2^N input patterns; the fresh factors enter through their means.
double denoise_exact_oracle(int N, double a, double delta);

/// a^M / M + (-1)^{M+1} delta^M / M.
double denoise_closed_form(int N, double a, double delta);

struct GsBoundParams {
  double c1 = 64.0;
  double c2 = 2.0;
};

struct GsPerturbRecord {
  Vector residuals;  // <g, Zt_j> - <g, Xt_j> - sqrt(theta n) u_j
  std::vector<bool> on_support;
  ScParams params;
  double off_support_bound = 0.0;
  double on_support_bound = 0.0;
  double off_support_max = 0.0;
  double on_support_max = 0.0;
  bool pass = false;
};

struct GsPerturbOutcome {
  TestReport report;
  std::vector<GsPerturbRecord> records;
};

/// Couples Gram-Schmidt runs on X and Z = X + sqrt(theta) g u^T (||g||^2 = n)
/// and checks the residual bounds on and off the support. Requires
/// n >= d^{1+epsilon}, epsilon > 0, and theta == 0 or
/// theta_stat <= theta < theta_comp.
GsPerturbOutcome gs_perturb_harness(const ScParams& params, const GsBoundParams& bound,
                                    double epsilon, int trials, const SeedStream& stream,
                                    int workers = 1, double pass_rate = 0.99,
                                    double ratio_limit = 0.2);

/// clone_cov on iid N(0,1) inputs: pooled KS of off-diagonal (N(0,1)) and
/// diagonal (N(0,2)) entries with Bonferroni, plus cross_moment_battery.
/// details.regime_satisfied records n >= 4 d^2.
TestReport clone_cov_null_battery(int d, int n, int trials, const SeedStream& stream,
                                  const BatteryOptions& options = {}, int workers = 1);

struct PlantedCheck {
  int k = 1;
  double theta = 0.0;
};

/// sqrt(n)((1/n) Z^T Z - I) against GOE targets with the same batteries as
/// clone_cov_null_battery; with `planted`, also checks the mean
/// theta sqrt(n) u u^T for a fixed signal.
TestReport wishart_clt_comparison(int d, int n, int trials, const SeedStream& stream,
                                  std::optional<PlantedCheck> planted = std::nullopt,
                                  const BatteryOptions& options = {}, int workers = 1);

/// Pooled KS + moment battery of symmetric null matrices against GOE
/// marginals; shared by the two batteries above.
TestReport goe_null_battery(const std::vector<Matrix>& trials, const BatteryOptions& options,
                            Rng& pair_rng, std::string name);

}  // namespace covwig
