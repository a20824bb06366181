#include "covwig/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "covwig/detect.hpp"
#include "covwig/errors.hpp"
#include "covwig/parallel.hpp"
#include "covwig/primitives.hpp"
#include "covwig/reductions.hpp"

namespace covwig {
namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance around `mean`.
double variance_of(std::span<const double> xs, double mean) {
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size() - 1);
}

// One-sample z for "mean of xs is `target`", using the empirical spread.
// Degenerate (constant) samples give 0 on an exact match and +inf otherwise.
double mean_z(std::span<const double> xs, double target) {
  const double m = mean_of(xs);
  const double sd = std::sqrt(variance_of(xs, m));
  const double diff = m - target;
  if (!(sd > 0.0)) {
    return std::abs(diff) <= 1e-9 * (1.0 + std::abs(target))
               ? 0.0
               : std::numeric_limits<double>::infinity();
  }
  return diff / (sd / std::sqrt(static_cast<double>(xs.size())));
}

double critical_z(double family_level, std::size_t tests) {
  const double bonferroni =
      normal_upper_quantile(family_level / (2.0 * static_cast<double>(std::max<std::size_t>(tests, 1))));
  return std::max(3.0, bonferroni);
}

struct Family {
  explicit Family(std::string family) : name(std::move(family)) {}

  std::string name;
  std::size_t tests = 0;
  double critical = 3.0;
  double worst_z = 0.0;
  nlohmann::json worst_at;

  void record(double z, nlohmann::json where) {
    ++tests;
    if (std::isnan(z)) z = std::numeric_limits<double>::infinity();
    if (tests == 1 || std::abs(z) > std::abs(worst_z)) {
      worst_z = z;
      worst_at = std::move(where);
    }
  }
  double ratio() const { return tests == 0 ? 0.0 : std::abs(worst_z) / critical; }
  bool pass() const { return ratio() <= 1.0; }
  nlohmann::json to_json() const {
    return {{"tests", tests},
            {"max_abs_z", std::abs(worst_z)},
            {"critical_z", critical},
            {"worst", worst_at},
            {"pass", pass()}};
  }
};

// Closed-walk count over four distinct vertices of the off-diagonal part.
double signed_four_cycles(const Matrix& y) {
  Matrix b = y;
  b.diagonal().setZero();
  const Matrix b2 = b * b;
  const double tr4 = b2.cwiseProduct(b2.transpose()).sum();
  const double deg = b2.diagonal().squaredNorm();
  const double quartic = b.array().square().square().sum();
  return tr4 - 2.0 * deg + quartic;
}

// Mean over all unordered pairs of entries sharing an index of the product
// of their standardized squares minus one.
double shared_index_square_product(const Matrix& y, const Matrix& mean, const Matrix& var) {
  const Eigen::Index d = y.rows();
  if (d < 2) return 0.0;
  Matrix a(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double s = y(i, j) - mean(i, j);
      a(i, j) = s * s / var(i, j) - 1.0;
    }
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double row = a.row(i).sum();
    const double row_sq = a.row(i).squaredNorm();
    total += 0.5 * (row * row - row_sq);
  }
  const double dd = static_cast<double>(d);
  return total / (dd * dd * (dd - 1.0) / 2.0);
}

std::vector<double> column_of(const std::vector<Matrix>& trials, Eigen::Index i, Eigen::Index j) {
  std::vector<double> xs(trials.size());
  for (std::size_t t = 0; t < trials.size(); ++t) xs[t] = trials[t](i, j);
  return xs;
}

nlohmann::json path_json(const SeedStream& stream) { return stream.path(); }

}  // namespace

nlohmann::json TestReport::to_json() const {
  nlohmann::json out;
  out["name"] = name;
  out["statistic"] = statistic;
  out["threshold"] = threshold;
  out["pass"] = pass;
  out["trials"] = trials;
  out["seed"] = seed;
  out["details"] = details;
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_upper_quantile(double tail) {
  if (!(tail > 0.0 && tail < 1.0)) throw DomainError("normal_upper_quantile: tail must lie in (0, 1)");
  return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

double ks_statistic(std::span<const double> samples, NormalTarget target) {
  if (samples.empty()) throw PreconditionError("ks_statistic: no samples");
  if (!(target.variance > 0.0)) throw DomainError("ks_statistic: target variance must be > 0");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double sd = std::sqrt(target.variance);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf((xs[i] - target.mean) / sd);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

namespace {

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form converges fast where the alternating series does not.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double m = 2.0 * j - 1.0;
      sum += std::exp(-m * m * pi2 / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double stephens_scale(std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return rn + 0.12 + 0.11 / rn;
}

}  // namespace

double ks_pvalue(double statistic, std::size_t n) {
  if (n == 0) throw PreconditionError("ks_pvalue: n must be >= 1");
  return kolmogorov_tail(stephens_scale(n) * statistic);
}

double ks_critical_value(double level, std::size_t n) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("ks_critical_value: level must lie in (0, 1)");
  double lo = 0.0;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_tail(mid) > level ? lo : hi) = mid;
  }
  return hi / stephens_scale(n);
}

TestReport ks_normality(std::span<const double> samples, NormalTarget target, double level,
                        std::string name) {
  if (samples.size() < 100) throw PreconditionError("ks_normality: need at least 100 samples");
  TestReport report;
  report.name = std::move(name);
  report.statistic = ks_statistic(samples, target);
  report.threshold = ks_critical_value(level, samples.size());
  const double p = ks_pvalue(report.statistic, samples.size());
  report.pass = p >= level;
  report.trials = static_cast<int>(samples.size());
  report.details = {{"p_value", p},
                    {"level", level},
                    {"target_mean", target.mean},
                    {"target_variance", target.variance}};
  return report;
}

MomentPrediction MomentPrediction::iid_null(Eigen::Index rows, Eigen::Index cols) {
  return {Matrix::Zero(rows, cols), Matrix::Ones(rows, cols), false};
}

MomentPrediction MomentPrediction::goe_null(int d) {
  MomentPrediction p{Matrix::Zero(d, d), Matrix::Ones(d, d), true};
  p.variance.diagonal().setConstant(2.0);
  return p;
}

MomentPrediction MomentPrediction::support_signal(const SparseSignal& u, double scale) {
  const Vector v = u.dense();
  Matrix mean(u.d, u.d);
  for (int j = 0; j < u.d; ++j) {
    for (int i = 0; i < u.d; ++i) mean(i, j) = scale * (v[i] * v[j]);
  }
  return {std::move(mean), Matrix::Constant(u.d, u.d, std::numeric_limits<double>::quiet_NaN()),
          true};
}

TestReport cross_moment_battery(const std::vector<Matrix>& trials,
                                const MomentPrediction& prediction,
                                const BatteryOptions& options, Rng& pair_rng, std::string name) {
  if (trials.size() < 30) throw PreconditionError("cross_moment_battery: need at least 30 trials");
  const Eigen::Index rows = prediction.mean.rows();
  const Eigen::Index cols = prediction.mean.cols();
  if (prediction.variance.rows() != rows || prediction.variance.cols() != cols) {
    throw DomainError("cross_moment_battery: prediction mean/variance shapes differ");
  }
  for (const Matrix& m : trials) {
    if (m.rows() != rows || m.cols() != cols) {
      throw DomainError("cross_moment_battery: trial shape differs from prediction");
    }
  }
  const bool square_symmetric = prediction.symmetric && rows == cols;
  const double T = static_cast<double>(trials.size());

  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!square_symmetric || i <= j) entries.emplace_back(i, j);
    }
  }

  std::vector<Family> families;
  families.emplace_back("mean");
  if (options.check_variances) families.emplace_back("variance");
  if (options.check_correlations && entries.size() >= 2) families.emplace_back("correlation");
  const bool second_order = options.check_second_order && square_symmetric && rows >= 2;
  if (second_order) {
    families.emplace_back("second_order");
    if (rows >= 4) families.emplace_back("four_cycle");
  }
  const double family_level = options.level / static_cast<double>(families.size());
  auto family = [&](const std::string& key) -> Family& {
    return *std::find_if(families.begin(), families.end(),
                         [&](const Family& f) { return f.name == key; });
  };

  // Per-entry means and variances.
  std::vector<std::vector<double>> columns;
  columns.reserve(entries.size());
  for (auto [i, j] : entries) columns.push_back(column_of(trials, i, j));

  Family& means = family("mean");
  means.critical = critical_z(family_level, entries.size());
  std::size_t variance_tests = 0;
  for (auto [i, j] : entries) variance_tests += std::isnan(prediction.variance(i, j)) ? 0 : 1;

  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto [i, j] = entries[e];
    const std::vector<double>& xs = columns[e];
    means.record(mean_z(xs, prediction.mean(i, j)), {i, j});

    if (!options.check_variances || std::isnan(prediction.variance(i, j))) continue;
    Family& vars = family("variance");
    vars.critical = critical_z(family_level, variance_tests);
    const double m = mean_of(xs);
    std::vector<double> dev2(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) dev2[t] = (xs[t] - m) * (xs[t] - m) * T / (T - 1.0);
    vars.record(mean_z(dev2, prediction.variance(i, j)), {i, j});
  }

  // Random subsample of pairwise entry correlations.
  if (options.check_correlations && entries.size() >= 2) {
    Family& corr = family("correlation");
    const std::size_t pairs = static_cast<std::size_t>(std::max(options.correlation_pairs, 0));
    corr.critical = critical_z(family_level, pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
      const std::size_t a = pair_rng.below(entries.size());
      std::size_t b = pair_rng.below(entries.size() - 1);
      if (b >= a) ++b;
      const std::vector<double>& xa = columns[a];
      const std::vector<double>& xb = columns[b];
      const double ma = mean_of(xa);
      const double mb = mean_of(xb);
      const double sa = std::sqrt(variance_of(xa, ma));
      const double sb = std::sqrt(variance_of(xb, mb));
      const nlohmann::json where = {{entries[a].first, entries[a].second},
                                    {entries[b].first, entries[b].second}};
      if (!(sa > 0.0) || !(sb > 0.0)) {
        corr.record(0.0, where);
        continue;
      }
      std::vector<double> products(xa.size());
      for (std::size_t t = 0; t < xa.size(); ++t) {
        products[t] = (xa[t] - ma) / sa * (xb[t] - mb) / sb;
      }
      corr.record(mean_z(products, 0.0), where);
    }
  }

  // Higher-order dependence pooled over the whole matrix.
  if (second_order) {
    Matrix var = prediction.variance;
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (std::isnan(var(i, j))) {
          const auto xs = column_of(trials, std::min(i, j), std::max(i, j));
          var(i, j) = variance_of(xs, mean_of(xs));
        }
        if (!(var(i, j) > 0.0)) var(i, j) = 1.0;
      }
    }
    std::vector<double> squares(trials.size());
    for (std::size_t t = 0; t < trials.size(); ++t) {
      squares[t] = shared_index_square_product(trials[t], prediction.mean, var);
    }
    Family& so = family("second_order");
    so.critical = critical_z(family_level, 1);
    so.record(mean_z(squares, 0.0), "pooled");

    if (rows >= 4) {
      std::vector<double> cycles(trials.size());
      for (std::size_t t = 0; t < trials.size(); ++t) {
        Matrix centered = trials[t] - prediction.mean;
        for (Eigen::Index j = 0; j < cols; ++j) {
          for (Eigen::Index i = 0; i < rows; ++i) centered(i, j) /= std::sqrt(var(i, j));
        }
        cycles[t] = signed_four_cycles(centered);
      }
      Family& fc = family("four_cycle");
      fc.critical = critical_z(family_level, 1);
      fc.record(mean_z(cycles, 0.0), "pooled");
    }
  }

  TestReport report;
  report.name = std::move(name);
  report.threshold = 1.0;
  report.trials = static_cast<int>(trials.size());
  bool correlation_pass = true;
  for (const Family& f : families) {
    report.statistic = std::max(report.statistic, f.ratio());
    report.details[f.name] = f.to_json();
    if (f.name == "correlation" || f.name == "second_order" || f.name == "four_cycle") {
      correlation_pass = correlation_pass && f.pass();
    }
  }
  report.pass = report.statistic <= report.threshold;
  report.details["correlation_pass"] = correlation_pass;
  report.details["level"] = options.level;
  return report;
}

double denoise_exact_oracle(int N, double a, double delta) {
  if (N < 1) throw PreconditionError("denoise_exact_oracle: N must be >= 1");
  if (N > 12) throw PreconditionError("denoise_exact_oracle: enumeration limited to N <= 12");
  // Largest M with 1 + 2 + ... + M <= N.
  int M = 0;
  int used = 0;
  while (used + M + 1 <= N) {
    ++M;
    used += M;
  }
  const double p = a + delta;
  if (std::abs(p) > 1.0 + 1e-15) throw DomainError("denoise_exact_oracle: |a + delta| must be <= 1");
  if (std::abs(a) > 1.0 / M + 1e-15) throw DomainError("denoise_exact_oracle: |a| must be <= 1/M");

  // Mean of the product of the i fresh factors in block i: (-a C(M,i)^{1/i})^i.
  std::vector<double> fresh(static_cast<std::size_t>(M), 1.0);
  for (int i = 1; i < M; ++i) {
    double binom = 1.0;
    for (int j = 0; j < i; ++j) binom *= static_cast<double>(M - j) / (j + 1);
    fresh[static_cast<std::size_t>(i)] = std::pow(-a * std::pow(binom, 1.0 / i), i);
  }

  const double up = 0.5 * (1.0 + p);
  const double down = 0.5 * (1.0 - p);
  double expectation = 0.0;
  for (unsigned pattern = 0; pattern < (1u << N); ++pattern) {
    double weight = 1.0;
    for (int t = 0; t < N; ++t) weight *= (pattern >> t & 1u) ? down : up;
    if (weight == 0.0) continue;
    double average = 0.0;
    int start = 0;
    for (int i = 0; i < M; ++i) {
      int product = 1;
      for (int t = start; t < start + (M - i); ++t) product *= (pattern >> t & 1u) ? -1 : 1;
      average += product * fresh[static_cast<std::size_t>(i)];
      start += M - i;
    }
    expectation += weight * average / M;
  }
  return (M % 2 == 1) ? expectation : -expectation;
}

double denoise_closed_form(int N, double a, double delta) {
  const int M = denoise_order(N);
  const double sign = (M % 2 == 1) ? 1.0 : -1.0;
  return (std::pow(a, M) + sign * std::pow(delta, M)) / M;
}

GsPerturbOutcome gs_perturb_harness(const ScParams& params, const GsBoundParams& bound,
                                    double epsilon, int trials, const SeedStream& stream,
                                    int workers, double pass_rate, double ratio_limit) {
  params.validate();
  if (!(bound.c1 > 0.0) || !(bound.c2 >= 0.0)) {
    throw PreconditionError("gs_perturb_harness: need c1 > 0 and c2 >= 0");
  }
  if (!(epsilon > 0.0)) throw PreconditionError("gs_perturb_harness: epsilon must be > 0");
  const double d = params.d;
  const double n = params.n;
  if (n < std::pow(d, 1.0 + epsilon)) {
    throw PreconditionError("gs_perturb_harness: need n >= d^{1+epsilon}");
  }
  const Thresholds th = thresholds(params.d, params.k, params.n);
  if (params.theta != 0.0 && !(params.theta >= th.theta_stat && params.theta < th.theta_comp)) {
    throw PreconditionError("gs_perturb_harness: theta must be 0 or lie in [theta_stat, theta_comp)");
  }
  if (trials < 1) throw PreconditionError("gs_perturb_harness: trials must be >= 1");

  const double theta = params.theta;
  const double k = params.k;
  const double slack = bound.c1 * std::pow(std::log(n), bound.c2);
  const double off_bound = slack * std::sqrt(theta);
  const double on_bound = slack * (theta * std::sqrt(n) / k + std::sqrt(theta) * d / (std::sqrt(n) * std::sqrt(k)) +
                                   std::pow(theta, 1.5) * std::sqrt(n) / std::sqrt(k));
  const double spike_scale = std::sqrt(theta) * std::sqrt(n);

  struct TrialResult {
    GsPerturbRecord record;
    std::vector<double> ratios;
  };
  auto run = [&](int t) {
    Rng rng = stream.child(static_cast<std::uint64_t>(t)).rng();
    const SparseSignal u = sample_sparse_signal(params.d, params.k, rng);
    Vector g = rng.normal_vector(params.n);
    g *= std::sqrt(n) / g.norm();
    const Matrix x = rng.normal_matrix(params.n, params.d);
    const Vector uv = u.dense();
    const Matrix z = x + std::sqrt(theta) * g * uv.transpose();

    const OrthoBasis qx = gram_schmidt(x);
    const OrthoBasis qz = gram_schmidt(z);
    TrialResult out;
    GsPerturbRecord& rec = out.record;
    rec.residuals = qz.q.transpose() * g - qx.q.transpose() * g - spike_scale * uv;
    rec.on_support.resize(static_cast<std::size_t>(params.d));
    rec.params = params;
    rec.off_support_bound = off_bound;
    rec.on_support_bound = on_bound;
    for (int j = 0; j < params.d; ++j) {
      const bool on = u.contains(j);
      rec.on_support[static_cast<std::size_t>(j)] = on;
      const double r = std::abs(rec.residuals[j]);
      if (on) {
        rec.on_support_max = std::max(rec.on_support_max, r);
        if (spike_scale > 0.0) out.ratios.push_back(r / (spike_scale * std::abs(uv[j])));
      } else {
        rec.off_support_max = std::max(rec.off_support_max, r);
      }
    }
    rec.pass = rec.off_support_max <= off_bound && rec.on_support_max <= on_bound;
    return out;
  };
  std::vector<TrialResult> results = run_trials(trials, workers, run);

  GsPerturbOutcome outcome;
  std::vector<double> ratios;
  int passed = 0;
  double off_max = 0.0;
  double on_max = 0.0;
  for (TrialResult& r : results) {
    passed += r.record.pass ? 1 : 0;
    off_max = std::max(off_max, r.record.off_support_max);
    on_max = std::max(on_max, r.record.on_support_max);
    ratios.insert(ratios.end(), r.ratios.begin(), r.ratios.end());
    outcome.records.push_back(std::move(r.record));
  }
  double median = 0.0;
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    const std::size_t mid = ratios.size() / 2;
    median = ratios.size() % 2 == 1 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  }

  TestReport& report = outcome.report;
  report.name = "gs_perturb";
  report.statistic = static_cast<double>(passed) / trials;
  report.threshold = pass_rate;
  report.trials = trials;
  report.seed = stream.master_seed();
  const bool ratio_ok = theta == 0.0 || median <= ratio_limit;
  report.pass = report.statistic >= pass_rate && ratio_ok;
  report.details = {{"path", path_json(stream)},
                    {"d", params.d},
                    {"k", params.k},
                    {"n", params.n},
                    {"theta", theta},
                    {"epsilon", epsilon},
                    {"c1", bound.c1},
                    {"c2", bound.c2},
                    {"off_support_bound", off_bound},
                    {"on_support_bound", on_bound},
                    {"off_support_max", off_max},
                    {"on_support_max", on_max},
                    {"median_ratio", median},
                    {"ratio_limit", ratio_limit},
                    {"ratio_pass", ratio_ok}};
  return outcome;
}

TestReport goe_null_battery(const std::vector<Matrix>& trials, const BatteryOptions& options,
                            Rng& pair_rng, std::string name) {
  if (trials.empty()) throw PreconditionError("goe_null_battery: no trials");
  const int d = static_cast<int>(trials.front().rows());
  std::vector<double> off;
  std::vector<double> diag;
  for (const Matrix& y : trials) {
    for (int j = 0; j < d; ++j) {
      diag.push_back(y(j, j));
      for (int i = 0; i < j; ++i) off.push_back(y(i, j));
    }
  }
  TestReport report;
  report.name = std::move(name);
  report.threshold = 1.0;
  report.trials = static_cast<int>(trials.size());
  report.pass = true;

  const bool have_off = off.size() >= 100;
  const double ks_level = options.level / (have_off ? 2.0 : 1.0);
  auto fold = [&](const TestReport& part, const char* key) {
    report.details[key] = part.to_json();
    report.statistic = std::max(report.statistic, part.statistic / part.threshold);
    report.pass = report.pass && part.pass;
  };
  if (have_off) fold(ks_normality(off, {0.0, 1.0}, ks_level, "ks_offdiagonal"), "ks_offdiagonal");
  fold(ks_normality(diag, {0.0, 2.0}, ks_level, "ks_diagonal"), "ks_diagonal");

  const TestReport moments =
      cross_moment_battery(trials, MomentPrediction::goe_null(d), options, pair_rng, "moments");
  fold(moments, "moments");
  report.details["correlation_pass"] = moments.details["correlation_pass"];
  return report;
}

TestReport clone_cov_null_battery(int d, int n, int trials, const SeedStream& stream,
                                  const BatteryOptions& options, int workers) {
  if (d < 1 || n < 1) throw PreconditionError("clone_cov_null_battery: need d, n >= 1");
  std::vector<Matrix> outputs = run_trials(trials, workers, [&](int t) {
    Rng rng = stream.child(static_cast<std::uint64_t>(t)).rng();
    const Matrix z = rng.normal_matrix(n, d);
    return clone_cov(z, rng);
  });
  Rng pair_rng = stream.child(kAuxIndex).rng();
  TestReport report = goe_null_battery(outputs, options, pair_rng, "clone_cov_null");
  report.seed = stream.master_seed();
  report.details["path"] = path_json(stream);
  report.details["d"] = d;
  report.details["n"] = n;
  report.details["regime_satisfied"] = static_cast<double>(n) >= 4.0 * d * d;
  return report;
}

TestReport wishart_clt_comparison(int d, int n, int trials, const SeedStream& stream,
                                  std::optional<PlantedCheck> planted,
                                  const BatteryOptions& options, int workers) {
  ScParams null_params{d, 1, 0.0, n};
  null_params.validate();
  const SeedStream null_stream = stream.child(0);
  std::vector<Matrix> outputs = run_trials(trials, workers, [&](int t) {
    Rng rng = null_stream.child(static_cast<std::uint64_t>(t)).rng();
    return rescaled_covariance(rng.normal_matrix(n, d));
  });
  Rng pair_rng = null_stream.child(kAuxIndex).rng();
  TestReport report = goe_null_battery(outputs, options, pair_rng, "wishart_clt");
  report.seed = stream.master_seed();
  report.details["path"] = path_json(stream);
  report.details["d"] = d;
  report.details["n"] = n;

  if (planted) {
    ScParams params{d, planted->k, planted->theta, n};
    params.validate();
    const SeedStream planted_stream = stream.child(1);
    Rng signal_rng = planted_stream.child(kAuxIndex).rng();
    const SparseSignal u = sample_sparse_signal(d, planted->k, signal_rng);
    std::vector<Matrix> planted_outputs = run_trials(trials, workers, [&](int t) {
      Rng rng = planted_stream.child(static_cast<std::uint64_t>(t)).rng();
      return rescaled_covariance(sample_sc_with_signal(params, u, false, rng).data);
    });
    BatteryOptions mean_only = options;
    mean_only.check_variances = false;
    mean_only.check_correlations = false;
    mean_only.check_second_order = false;
    const TestReport means = cross_moment_battery(
        planted_outputs,
        MomentPrediction::support_signal(u, planted->theta * std::sqrt(static_cast<double>(n))),
        mean_only, pair_rng, "planted_mean");
    report.details["planted_mean"] = means.to_json();
    report.statistic = std::max(report.statistic, means.statistic);
    report.pass = report.pass && means.pass;
  }
  return report;
}

}  // namespace covwig
