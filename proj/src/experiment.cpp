#include "covwig/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "covwig/core.hpp"
#include "covwig/detect.hpp"
#include "covwig/errors.hpp"
#include "covwig/parallel.hpp"
#include "covwig/primitives.hpp"
#include "covwig/reductions.hpp"

namespace covwig {
namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

double fraction(int hits, int total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / total;
}

// Reduces an SC data matrix to a symmetric SpWig-shaped matrix.
class Reducer {
 public:
  Reducer(const ExperimentConfig& config, int n) : type_(config.reduction.type) {
    if (type_ == "spcov_to_spwig") {
      const DerivedConstants c = derive_constants(config.reduction.alpha, config.reduction.epsilon,
                                                  config.model.theta, n, config.model.k);
      two_k_ = 2 * c.K;
      psi_ = c.psi;
    }
  }

  Matrix operator()(const Matrix& z, Rng& rng) const {
    if (type_ == "spcov_to_spwig") return spcov_to_spwig(z, two_k_, psi_, rng, false).output;
    return clone_cov(z, rng);
  }

 private:
  std::string type_;
  int two_k_ = 0;
  double psi_ = 0.0;
};

struct RouteStatistics {
  double direct = 0.0;
  double reduced = 0.0;
};

RouteStatistics route_statistics(const ExperimentConfig& config, const Reducer& reduce,
                                 const Matrix& z, Rng& rng) {
  const int k = config.model.k;
  const double c = config.detect.c;
  const Matrix reduced = reduce(z, rng);
  if (config.detect.type == "threshold") {
    return {covariance_detect_sc(z, k, c).statistic, threshold_detect_wig(reduced, k, c).statistic};
  }
  return {spectral_detect_wig(rescaled_covariance(z), c).statistic,
          spectral_detect_wig(reduced, c).statistic};
}

std::vector<int> support_of(const Vector& v) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) s.push_back(static_cast<int>(i));
  }
  return s;
}

// Split-sample recovery: support from the reduced first half, direction from
// the restricted covariance of the second half.
Vector chain_recover(const ExperimentConfig& config, const Matrix& z, Rng& rng) {
  const int half = static_cast<int>(z.rows()) / 2;
  const Matrix first = z.topRows(half);
  const Matrix second = z.bottomRows(z.rows() - half);
  const Reducer reduce(config, half);
  const std::vector<int> support = support_of(recover_topk(reduce(first, rng), config.model.k).u_hat);

  Matrix restricted(second.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    restricted.col(static_cast<Eigen::Index>(c)) = second.col(support[c]);
  }
  const Vector direction = top_eigenpair(rescaled_covariance(restricted)).vector;
  Vector u_hat = Vector::Zero(z.cols());
  for (std::size_t c = 0; c < support.size(); ++c) u_hat[support[c]] = direction[static_cast<Eigen::Index>(c)];
  return u_hat / u_hat.norm();
}

TestReport route_report(const std::string& name, const RouteStats& r, const ExperimentConfig& config,
                        bool null_only) {
  TestReport report;
  report.name = name;
  report.trials = r.null_trials + r.planted_trials;
  report.seed = config.seed;
  if (null_only) {
    const double a = config.experiment.false_alarm;
    report.statistic = r.type1;
    report.threshold = a + 3.0 * std::sqrt(a * (1.0 - a) / std::max(r.null_trials, 1));
  } else {
    report.statistic = r.type1 + r.type2;
    report.threshold = config.experiment.max_error;
  }
  report.pass = report.statistic <= report.threshold;
  report.details = {{"route", r.route},
                    {"type1", r.type1},
                    {"type2", r.type2},
                    {"detector_threshold", r.threshold},
                    {"null_trials", r.null_trials},
                    {"planted_trials", r.planted_trials}};
  return report;
}

}  // namespace

double upper_quantile(std::vector<double> values, double tail) {
  if (values.empty()) throw PreconditionError("upper_quantile: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const auto index = static_cast<std::size_t>(std::clamp(std::ceil((1.0 - tail) * n) - 1.0, 0.0, n - 1.0));
  return values[index];
}

TestReport denoise_exactness_battery(int max_n, int draws, const SeedStream& stream, int workers,
                                     double z_limit, double closed_form_tol) {
  if (max_n < 1 || max_n > 12) throw PreconditionError("denoise_exactness_battery: max_n must lie in [1, 12]");
  if (draws < 2) throw PreconditionError("denoise_exactness_battery: need at least 2 draws");

  struct Cell {
    int N;
    int ai;
    int ti;
    double a;
    double delta;
  };
  std::vector<Cell> cells;
  for (int N = 1; N <= max_n; ++N) {
    const int M = denoise_order(N);
    const double A = std::min(1.0 / M, 0.5);
    const std::vector<double> as = linspace(-A, A, 10);
    const std::vector<double> ts = linspace(-1.0, 1.0, 10);
    for (int ai = 0; ai < 10; ++ai) {
      for (int ti = 0; ti < 10; ++ti) {
        const double a = as[static_cast<std::size_t>(ai)];
        cells.push_back({N, ai, ti, a, ts[static_cast<std::size_t>(ti)] * std::abs(a)});
      }
    }
  }

  struct CellResult {
    double z = 0.0;
    double gap = 0.0;
  };
  const std::vector<CellResult> results =
      run_trials(static_cast<int>(cells.size()), workers, [&](int c) {
        const Cell& cell = cells[static_cast<std::size_t>(c)];
        Rng rng = stream
                      .child({static_cast<std::uint64_t>(cell.N), static_cast<std::uint64_t>(cell.ai),
                              static_cast<std::uint64_t>(cell.ti)})
                      .rng();
        const double oracle = denoise_exact_oracle(cell.N, cell.a, cell.delta);
        std::vector<int> bits(static_cast<std::size_t>(cell.N));
        long long total = 0;
        for (int t = 0; t < draws; ++t) {
          for (int& b : bits) b = rng.rademacher(cell.a + cell.delta);
          total += denoise(bits, cell.a, rng);
        }
        const double mean = static_cast<double>(total) / draws;
        const double sd = std::sqrt(std::max(1.0 - oracle * oracle, 0.0) / draws);
        CellResult r;
        r.z = sd > 0.0 ? (mean - oracle) / sd : (mean == oracle ? 0.0 : std::numeric_limits<double>::infinity());
        r.gap = std::abs(oracle - denoise_closed_form(cell.N, cell.a, cell.delta));
        return r;
      });

  double worst_z = 0.0;
  double worst_gap = 0.0;
  nlohmann::json worst_cell;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (std::abs(results[c].z) >= worst_z) {
      worst_z = std::abs(results[c].z);
      worst_cell = {{"N", cells[c].N}, {"a", cells[c].a}, {"delta", cells[c].delta}};
    }
    worst_gap = std::max(worst_gap, results[c].gap);
  }
  TestReport report;
  report.name = "denoise_exactness";
  report.statistic = worst_z;
  report.threshold = z_limit;
  report.trials = draws;
  report.seed = stream.master_seed();
  report.pass = worst_z <= z_limit && worst_gap <= closed_form_tol;
  report.details = {{"path", stream.path()},
                    {"cells", cells.size()},
                    {"max_n", max_n},
                    {"worst_cell", worst_cell},
                    {"max_closed_form_gap", worst_gap},
                    {"closed_form_tol", closed_form_tol}};
  return report;
}

std::vector<TestReport> run_verify_batteries(const ExperimentConfig& config) {
  const SeedStream root(config.seed);
  const ModelConfig& m = config.model;
  const VerifyConfig& v = config.verify;
  BatteryOptions options;
  options.level = v.level;
  options.correlation_pairs = v.correlation_pairs;

  std::vector<TestReport> reports;
  for (const std::string& battery : v.batteries) {
    if (battery == "denoise") {
      reports.push_back(denoise_exactness_battery(v.denoise_max_n, v.denoise_draws, root.child(0),
                                                  config.workers));
    } else if (battery == "clone_cov_null") {
      reports.push_back(clone_cov_null_battery(m.d, m.n, config.trials, root.child(1), options,
                                               config.workers));
    } else if (battery == "wishart_clt") {
      std::optional<PlantedCheck> planted;
      if (m.theta > 0.0) planted = PlantedCheck{m.k, m.theta};
      reports.push_back(wishart_clt_comparison(m.d, m.n, config.trials, root.child(2), planted, options,
                                               config.workers));
    } else if (battery == "gs_perturb") {
      reports.push_back(gs_perturb_harness({m.d, m.k, m.theta, m.n}, {v.c1, v.c2}, v.epsilon,
                                           config.trials, root.child(3), config.workers)
                            .report);
    } else {
      throw ConfigError("verify.batteries", "unknown battery '" + battery + "'");
    }
  }
  return reports;
}

TransferResult run_transfer_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const ModelConfig& m = config.model;
  const ExperimentSection& e = config.experiment;
  const SeedStream root(config.seed);
  const Reducer reduce(config, m.n);
  const ScParams null_params{m.d, m.k, 0.0, m.n};
  const ScParams planted_params{m.d, m.k, m.theta, m.n};

  // Held-out null draws fix both detection thresholds.
  const SeedStream calibration = root.child(10);
  const std::vector<RouteStatistics> null_stats =
      run_trials(e.calibration_trials, config.workers, [&](int t) {
        Rng rng = calibration.child(static_cast<std::uint64_t>(t)).rng();
        const Matrix z = sample_sc(null_params, m.fixed_spike_norm, rng).data;
        return route_statistics(config, reduce, z, rng);
      });
  std::vector<double> direct_null;
  std::vector<double> reduced_null;
  for (const RouteStatistics& s : null_stats) {
    direct_null.push_back(s.direct);
    reduced_null.push_back(s.reduced);
  }
  const double direct_cut = upper_quantile(direct_null, e.false_alarm);
  const double reduced_cut = upper_quantile(reduced_null, e.false_alarm);

  struct Trial {
    bool planted = false;
    RouteStatistics stats;
  };
  const SeedStream detection = root.child(11);
  const std::vector<Trial> trials = run_trials(config.trials, config.workers, [&](int t) {
    Rng rng = detection.child(static_cast<std::uint64_t>(t)).rng();
    Trial out;
    out.planted = !e.null_only && rng.bernoulli(0.5);
    const Matrix z = sample_sc(out.planted ? planted_params : null_params, m.fixed_spike_norm, rng).data;
    out.stats = route_statistics(config, reduce, z, rng);
    return out;
  });

  RouteStats direct{"direct", 0, 0, 0.0, 0.0, direct_cut, std::numeric_limits<double>::quiet_NaN()};
  RouteStats reduced{"reduced", 0, 0, 0.0, 0.0, reduced_cut, std::numeric_limits<double>::quiet_NaN()};
  int direct_fp = 0, direct_fn = 0, reduced_fp = 0, reduced_fn = 0;
  for (const Trial& t : trials) {
    const bool direct_says = t.stats.direct > direct_cut;
    const bool reduced_says = t.stats.reduced > reduced_cut;
    if (t.planted) {
      ++direct.planted_trials;
      ++reduced.planted_trials;
      direct_fn += direct_says ? 0 : 1;
      reduced_fn += reduced_says ? 0 : 1;
    } else {
      ++direct.null_trials;
      ++reduced.null_trials;
      direct_fp += direct_says ? 1 : 0;
      reduced_fp += reduced_says ? 1 : 0;
    }
  }
  direct.type1 = fraction(direct_fp, direct.null_trials);
  direct.type2 = fraction(direct_fn, direct.planted_trials);
  reduced.type1 = fraction(reduced_fp, reduced.null_trials);
  reduced.type2 = fraction(reduced_fn, reduced.planted_trials);

  TransferResult result;
  const std::string prefix = e.null_only ? "false_positive_" : "transfer_";
  result.reports.push_back(route_report(prefix + "direct", direct, config, e.null_only));
  result.reports.push_back(route_report(prefix + "reduced", reduced, config, e.null_only));

  if (e.recovery && !e.null_only) {
    const SeedStream recovery = root.child(12);
    struct Losses {
      double direct = 0.0;
      double chain = 0.0;
    };
    const std::vector<Losses> losses = run_trials(config.trials, config.workers, [&](int t) {
      Rng rng = recovery.child(static_cast<std::uint64_t>(t)).rng();
      const ScSample sample = sample_sc(planted_params, m.fixed_spike_norm, rng);
      const SparseSignal& u = sample.truth->u;
      Losses out;
      out.direct = loss(u, recover_topk(rescaled_covariance(sample.data), m.k).u_hat);
      out.chain = loss(u, chain_recover(config, sample.data, rng));
      return out;
    });
    double direct_sum = 0.0;
    double chain_sum = 0.0;
    for (const Losses& l : losses) {
      direct_sum += l.direct;
      chain_sum += l.chain;
    }
    direct.mean_loss = direct_sum / config.trials;
    reduced.mean_loss = chain_sum / config.trials;

    TestReport report;
    report.name = "recovery_chain";
    report.statistic = reduced.mean_loss - direct.mean_loss;
    report.threshold = e.loss_margin;
    report.pass = report.statistic <= report.threshold;
    report.trials = config.trials;
    report.seed = config.seed;
    report.details = {{"direct_loss", direct.mean_loss}, {"chain_loss", reduced.mean_loss}};
    result.reports.push_back(report);
  }

  result.routes = {direct, reduced};
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "route,null_trials,planted_trials,type1,type2,error,threshold,mean_loss\n";
  for (const RouteStats& r : result.routes) {
    csv << r.route << ',' << r.null_trials << ',' << r.planted_trials << ',' << r.type1 << ','
        << r.type2 << ',' << r.type1 + r.type2 << ',' << r.threshold << ',';
    if (!std::isnan(r.mean_loss)) csv << r.mean_loss;
    csv << '\n';
  }
  result.csv = csv.str();
  return result;
}

PhaseSweepResult run_phase_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const ExperimentSection& e = config.experiment;
  const int d = config.model.d;
  const double dd = d;
  const int n = std::max(d, static_cast<int>(std::ceil(std::pow(dd, e.gamma) - 1e-9)));
  const SeedStream root(config.seed);

  // The null law depends only on (d, n): one calibration serves every point.
  const ScParams null_params{d, 1, 0.0, n};
  const SeedStream calibration = root.child(20);
  struct Stats {
    double entrywise = 0.0;
    double spectral = 0.0;
  };
  auto statistics = [&](const Matrix& z) {
    const Matrix w = rescaled_covariance(z);
    return Stats{threshold_detect_wig(w, 1, 1.0).statistic, spectral_detect_wig(w, 0.0).statistic};
  };
  const std::vector<Stats> null_stats = run_trials(e.calibration_trials, config.workers, [&](int t) {
    Rng rng = calibration.child(static_cast<std::uint64_t>(t)).rng();
    return statistics(sample_sc(null_params, false, rng).data);
  });
  std::vector<double> entry_null;
  std::vector<double> spec_null;
  for (const Stats& s : null_stats) {
    entry_null.push_back(s.entrywise);
    spec_null.push_back(s.spectral);
  }
  const double entry_cut = upper_quantile(entry_null, e.false_alarm);
  const double spec_cut = upper_quantile(spec_null, e.false_alarm);

  PhaseSweepResult result;
  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "alpha,beta,gamma,d,power_threshold,power_spectral\n";
  for (std::size_t ai = 0; ai < e.alphas.size(); ++ai) {
    for (std::size_t bi = 0; bi < e.betas.size(); ++bi) {
      PhasePoint p;
      p.alpha = e.alphas[ai];
      p.beta = e.betas[bi];
      p.gamma = e.gamma;
      p.d = d;
      p.k = std::clamp(static_cast<int>(std::ceil(std::pow(dd, p.alpha) - 1e-9)), 1, d);
      p.n = n;
      p.theta = std::pow(dd, p.beta);
      const ScParams params{d, p.k, p.theta, n};
      const SeedStream point = root.child({21, ai, bi});
      const std::vector<Stats> stats = run_trials(config.trials, config.workers, [&](int t) {
        Rng rng = point.child(static_cast<std::uint64_t>(t)).rng();
        return statistics(sample_sc(params, false, rng).data);
      });
      int entry_hits = 0;
      int spec_hits = 0;
      for (const Stats& s : stats) {
        entry_hits += s.entrywise > entry_cut ? 1 : 0;
        spec_hits += s.spectral > spec_cut ? 1 : 0;
      }
      p.power_threshold = fraction(entry_hits, config.trials);
      p.power_spectral = fraction(spec_hits, config.trials);
      result.points.push_back(p);
      csv << p.alpha << ',' << p.beta << ',' << p.gamma << ',' << p.d << ',' << p.power_threshold
          << ',' << p.power_spectral << '\n';
    }
  }
  result.csv = csv.str();

  TestReport report;
  report.name = "phase_sweep";
  report.statistic = static_cast<double>(result.points.size());
  report.threshold = static_cast<double>(e.alphas.size() * e.betas.size());
  report.pass = true;
  report.trials = config.trials;
  report.seed = config.seed;
  report.details = {{"d", d},
                    {"n", n},
                    {"entrywise_threshold", entry_cut},
                    {"spectral_threshold", spec_cut},
                    {"false_alarm", e.false_alarm}};
  result.reports.push_back(report);
  return result;
}

}  // namespace covwig
