#pragma once

// Orchestration behind the command-line front end: configured verification
// batteries, the hardness-transfer experiment and the phase sweep.

#include <string>
#include <vector>

#include "covwig/config.hpp"
#include "covwig/sampling.hpp"
#include "covwig/verify.hpp"

namespace covwig {

/// Monte-Carlo mean of denoise over `draws` iid Rad(a + delta) input streams
/// against denoise_exact_oracle, for N = 1..max_n on a 10 x 10 (a, delta)
/// grid with |delta| <= |a| <= min(1/M, 1/2). statistic = max |z|,
/// threshold = z_limit; the oracle must also match denoise_closed_form to
/// closed_form_tol in every cell.
TestReport denoise_exactness_battery(int max_n, int draws, const SeedStream& stream,
                                     int workers = 1, double z_limit = 4.0,
                                     double closed_form_tol = 1e-12);

/// Runs config.verify.batteries in order.
std::vector<TestReport> run_verify_batteries(const ExperimentConfig& config);

struct RouteStats {
  std::string route;  // direct | reduced
  int null_trials = 0;
  int planted_trials = 0;
  double type1 = 0.0;
  double type2 = 0.0;
  double threshold = 0.0;  // calibrated on held-out null draws
  double mean_loss = 0.0;  // recovery mode only; NaN otherwise
};

struct TransferResult {
  std::vector<RouteStats> routes;
  std::vector<TestReport> reports;
  /// Columns: route,null_trials,planted_trials,type1,type2,error,threshold,mean_loss.
  std::string csv;
};

/// Direct SC detection against reduce-then-SpWig detection on the same
/// instances, each thresholded at the (1 - false_alarm) quantile of its
/// statistic over held-out null draws. With experiment.recovery, also
/// compares direct top-k recovery against the split-sample chain: reduce the
/// first half, take the top-k support of the reduced matrix, then run
/// spectral recovery on that support in the second half.
TransferResult run_transfer_experiment(const ExperimentConfig& config);

struct PhasePoint {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int d = 0;
  int k = 0;
  int n = 0;
  double theta = 0.0;
  double power_threshold = 0.0;
  double power_spectral = 0.0;
};

struct PhaseSweepResult {
  std::vector<PhasePoint> points;
  std::vector<TestReport> reports;
  /// Columns: alpha,beta,gamma,d,power_threshold,power_spectral.
  std::string csv;
};

/// For each (alpha, beta) on the grid: k = ceil(d^alpha), theta = d^beta,
/// n = ceil(d^gamma); empirical power of the entrywise and spectral
/// covariance detectors at null-calibrated thresholds.
PhaseSweepResult run_phase_sweep(const ExperimentConfig& config);

/// Empirical (1 - tail) quantile used as a "statistic > threshold" cutoff.
double upper_quantile(std::vector<double> values, double tail);

}  // namespace covwig
