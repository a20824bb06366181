#include <gtest/gtest.h>

#include <cmath>

#include "covwig/errors.hpp"
#include "covwig/experiment.hpp"
#include "covwig/io.hpp"

using namespace covwig;

namespace {

ExperimentConfig small_transfer() {
  ExperimentConfig c;
  c.mode = Mode::Experiment;
  c.seed = 5;
  c.trials = 60;
  c.model.d = 10;
  c.model.k = 2;
  c.model.n = 320;
  c.model.theta = 1.0;
  c.experiment.calibration_trials = 60;
  return c;
}

}  // namespace

TEST(UpperQuantile, OrderStatistics) {
  const std::vector<double> xs{5, 1, 4, 2, 3, 6, 7, 8, 9, 10};
  EXPECT_EQ(upper_quantile(xs, 0.1), 9.0);
  EXPECT_EQ(upper_quantile(xs, 0.5), 5.0);
  EXPECT_EQ(upper_quantile(xs, 0.999), 1.0);
  EXPECT_THROW(upper_quantile({}, 0.1), PreconditionError);
}

TEST(DenoiseBattery, SmallGridPasses) {
  const TestReport r = denoise_exactness_battery(3, 4000, SeedStream(1));
  EXPECT_TRUE(r.pass) << r.to_json().dump();
  EXPECT_EQ(r.name, "denoise_exactness");
  const TestReport again = denoise_exactness_battery(3, 4000, SeedStream(1), 3);
  EXPECT_EQ(reports_jsonl({r}), reports_jsonl({again}));
}

TEST(VerifyBatteries, OrderAndNames) {
  ExperimentConfig c;
  c.mode = Mode::Verify;
  c.trials = 40;
  c.model.d = 5;
  c.model.k = 2;
  c.model.n = 200;
  c.verify.batteries = {"gs_perturb", "denoise", "clone_cov_null"};
  c.verify.denoise_max_n = 2;
  c.verify.denoise_draws = 1000;
  const std::vector<TestReport> reports = run_verify_batteries(c);
  ASSERT_EQ(reports.size(), 3u);
  EXPECT_EQ(reports[0].name, "gs_perturb");
  EXPECT_EQ(reports[1].name, "denoise_exactness");
  EXPECT_EQ(reports[2].name, "clone_cov_null");
}

TEST(Transfer, StrongSignalSeparatesOnBothRoutes) {
  const TransferResult r = run_transfer_experiment(small_transfer());
  ASSERT_EQ(r.reports.size(), 2u);
  EXPECT_EQ(r.reports[0].name, "transfer_direct");
  EXPECT_EQ(r.reports[1].name, "transfer_reduced");
  for (const TestReport& rep : r.reports) EXPECT_TRUE(rep.pass) << rep.to_json().dump();
  ASSERT_EQ(r.routes.size(), 2u);
  EXPECT_EQ(r.routes[0].null_trials + r.routes[0].planted_trials, 60);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "route,null_trials,planted_trials,type1,type2,error,threshold,mean_loss");
}

TEST(Transfer, NullOnlyReportsFalsePositives) {
  ExperimentConfig c = small_transfer();
  c.experiment.null_only = true;
  const TransferResult r = run_transfer_experiment(c);
  EXPECT_EQ(r.reports[0].name, "false_positive_direct");
  EXPECT_EQ(r.routes[0].planted_trials, 0);
  EXPECT_EQ(r.routes[0].null_trials, 60);
}

TEST(Transfer, RecoveryReport) {
  ExperimentConfig c = small_transfer();
  c.experiment.recovery = true;
  c.trials = 30;
  const TransferResult r = run_transfer_experiment(c);
  ASSERT_EQ(r.reports.size(), 3u);
  const TestReport& rec = r.reports[2];
  EXPECT_EQ(rec.name, "recovery_chain");
  const double direct = rec.details.at("direct_loss").get<double>();
  const double chain = rec.details.at("chain_loss").get<double>();
  EXPECT_GE(direct, 0.0);
  EXPECT_LE(chain, 1.0);
  EXPECT_NEAR(rec.statistic, chain - direct, 1e-15);
}

TEST(Transfer, DeterministicAcrossWorkers) {
  ExperimentConfig c = small_transfer();
  const TransferResult a = run_transfer_experiment(c);
  c.workers = 4;
  const TransferResult b = run_transfer_experiment(c);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(reports_jsonl(a.reports), reports_jsonl(b.reports));
}

TEST(PhaseSweep, GridShapeAndMonotonePower) {
  ExperimentConfig c;
  c.mode = Mode::Experiment;
  c.trials = 40;
  c.model.d = 16;
  c.experiment.type = "phase_sweep";
  c.experiment.calibration_trials = 40;
  c.experiment.gamma = 2.0;
  c.experiment.alphas = {0.25};
  c.experiment.betas = {-3.0, 0.5};
  const PhaseSweepResult r = run_phase_sweep(c);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].n, 256);
  EXPECT_EQ(r.points[0].k, 2);
  // theta = d^0.5 = 4 is far above both thresholds; d^-3 is far below.
  EXPECT_EQ(r.points[1].power_spectral, 1.0);
  EXPECT_LE(r.points[0].power_spectral, 0.3);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "alpha,beta,gamma,d,power_threshold,power_spectral");
}
