// covwig: command-line front end.
//
//   covwig <sample|reduce|detect|verify|experiment> --config PATH
//          [--seed U64] [--workers N] [--out DIR]
//
// Every run writes DIR/config.json (the effective configuration),
// DIR/reports.jsonl and DIR/summary.csv, plus mode-specific files.
// Exit status is 0 iff every report passes, 1 if one fails, 2 on errors.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "covwig/config.hpp"
#include "covwig/detect.hpp"
#include "covwig/errors.hpp"
#include "covwig/experiment.hpp"
#include "covwig/io.hpp"
#include "covwig/reductions.hpp"

namespace fs = std::filesystem;
using namespace covwig;

namespace {

std::string padded(int t) {
  std::ostringstream s;
  s << std::setw(4) << std::setfill('0') << t;
  return s.str();
}

Matrix load_matrix(const std::string& path) {
  if (fs::path(path).extension() == ".csv") return read_matrix_csv(path);
  return read_matrix_binary(path);
}

// One SC instance: from model.input when given, else freshly sampled.
ScSample sc_instance(const ExperimentConfig& config, Rng& rng) {
  const ModelConfig& m = config.model;
  if (!m.input.empty()) return ScSample{load_matrix(m.input), std::nullopt};
  return sample_sc({m.d, m.k, m.theta, m.n}, m.fixed_spike_norm, rng);
}

std::vector<TestReport> run_sample(const ExperimentConfig& config, const fs::path& out) {
  const ModelConfig& m = config.model;
  const SeedStream stream = SeedStream(config.seed).child(30);
  std::ostringstream index;
  index << "trial,file,planted\n";
  for (int t = 0; t < config.trials; ++t) {
    Rng rng = stream.child(static_cast<std::uint64_t>(t)).rng();
    const std::string stem = "sample_" + padded(t);
    bool planted = false;
    if (m.type == "sc") {
      const ScSample s = sample_sc({m.d, m.k, m.theta, m.n}, m.fixed_spike_norm, rng);
      write_matrix_binary(out / (stem + ".bin"), s.data);
      if (s.truth && m.theta > 0.0) {
        planted = true;
        write_text(out / (stem + ".truth.json"), to_json(*s.truth).dump(2) + "\n");
      }
    } else {
      const WigSample s = sample_wig({m.d, m.k, m.lambda}, rng);
      write_matrix_binary(out / (stem + ".bin"), s.data);
      if (s.truth && m.lambda > 0.0) {
        planted = true;
        write_text(out / (stem + ".truth.json"), to_json(*s.truth).dump(2) + "\n");
      }
    }
    index << t << ',' << stem << ".bin," << (planted ? 1 : 0) << '\n';
  }
  write_text(out / "samples.csv", index.str());
  return {};
}

std::vector<TestReport> run_reduce(const ExperimentConfig& config, const fs::path& out) {
  Rng rng = SeedStream(config.seed).child(31).rng();
  const ScSample input = sc_instance(config, rng);
  const Matrix& z = input.data;
  write_matrix_binary(out / "input.bin", z);
  if (input.truth) write_text(out / "input.truth.json", to_json(*input.truth).dump(2) + "\n");

  const std::string& type = config.reduction.type;
  if (type == "clone_cov") {
    write_matrix_binary(out / "output.bin", clone_cov(z, rng));
  } else if (type == "spcov_to_spwig") {
    const DerivedConstants c = derive_constants(config.reduction.alpha, config.reduction.epsilon,
                                                config.model.theta, static_cast<int>(z.rows()),
                                                config.model.k);
    const SpWigReduction r = spcov_to_spwig(z, 2 * c.K, c.psi, rng, true);
    write_matrix_binary(out / "output.bin", r.output);
    write_matrix_binary(out / "basis.bin", r.trace.basis->q);
    write_matrix_binary(out / "denoised.bin", *r.trace.denoised);
    for (std::size_t l = 0; l < r.trace.flipped.size(); ++l) {
      write_matrix_binary(out / ("flipped_" + padded(static_cast<int>(l)) + ".bin"), r.trace.flipped[l]);
    }
    nlohmann::json constants = {{"A", c.A}, {"K", c.K}, {"C", c.C}, {"M", c.M}, {"psi", c.psi},
                                {"gauss_p", r.trace.constants.gauss_p}};
    write_text(out / "constants.json", constants.dump(2) + "\n");
  } else if (type == "subsample") {
    const SubsampleResult r = subsample_reduce(z, rng);
    write_matrix_binary(out / "output.bin", r.data);
    write_text(out / "kept.json", nlohmann::json(std::vector<bool>(r.kept)).dump() + "\n");
  } else if (type == "pad") {
    const PadResult r = pad_reduce(z, rng);
    write_matrix_binary(out / "output.bin", r.data);
    write_text(out / "position.json", nlohmann::json(r.position).dump() + "\n");
  } else if (type == "reflection") {
    write_matrix_binary(out / "output.bin", reflection_clone(z));
  } else {
    write_matrix_binary(out / "output.bin", sample_double(z, rng));
  }
  return {};
}

std::vector<TestReport> run_detect(const ExperimentConfig& config, const fs::path& out) {
  const ModelConfig& m = config.model;
  const SeedStream stream = SeedStream(config.seed).child(32);
  const int trials = m.input.empty() ? config.trials : 1;
  std::ostringstream csv;
  csv << std::setprecision(17) << "trial,planted,statistic,threshold,decision\n";
  for (int t = 0; t < trials; ++t) {
    Rng rng = stream.child(static_cast<std::uint64_t>(t)).rng();
    Matrix y;
    bool planted = false;
    if (m.type == "sc") {
      const ScSample s = sc_instance(config, rng);
      planted = s.truth.has_value() && m.theta > 0.0;
      y = rescaled_covariance(s.data);
    } else if (!m.input.empty()) {
      y = load_matrix(m.input);
    } else {
      WigSample s = sample_wig({m.d, m.k, m.lambda}, rng);
      planted = m.lambda > 0.0;
      y = std::move(s.data);
    }
    const DetectorOutcome o = config.detect.type == "threshold"
                                  ? threshold_detect_wig(y, m.k, config.detect.c)
                                  : spectral_detect_wig(y, config.detect.c);
    csv << t << ',' << (planted ? 1 : 0) << ',' << o.statistic << ',' << o.threshold << ','
        << to_string(o.decision) << '\n';
  }
  write_text(out / "decisions.csv", csv.str());
  return {};
}

std::vector<TestReport> run_experiment(const ExperimentConfig& config, const fs::path& out) {
  if (config.experiment.type == "phase_sweep") {
    PhaseSweepResult r = run_phase_sweep(config);
    write_text(out / "phase_sweep.csv", r.csv);
    return r.reports;
  }
  TransferResult r = run_transfer_experiment(config);
  write_text(out / "transfer.csv", r.csv);
  return r.reports;
}

int execute(Mode mode, const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<int> workers, std::optional<std::string> out_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
  doc["mode"] = to_string(mode);
  if (seed) doc["seed"] = *seed;
  if (workers) doc["workers"] = *workers;
  if (out_dir) doc["output_dir"] = *out_dir;
  const ExperimentConfig config = parse_config(doc);

  const fs::path out(config.output_dir);
  fs::create_directories(out);
  write_text(out / "config.json", serialize_config(config));

  std::vector<TestReport> reports;
  switch (config.mode) {
    case Mode::Sample: reports = run_sample(config, out); break;
    case Mode::Reduce: reports = run_reduce(config, out); break;
    case Mode::Detect: reports = run_detect(config, out); break;
    case Mode::Verify: reports = run_verify_batteries(config); break;
    case Mode::Experiment: reports = run_experiment(config, out); break;
  }
  write_reports_jsonl(out / "reports.jsonl", reports);
  write_summary_csv(out / "summary.csv", reports);

  bool all_pass = true;
  for (const TestReport& r : reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " statistic=" << r.statistic
              << " threshold=" << r.threshold << '\n';
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiked covariance to spiked Wigner reductions and verification harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;

  const std::pair<const char*, Mode> modes[] = {{"sample", Mode::Sample},
                                                 {"reduce", Mode::Reduce},
                                                 {"detect", Mode::Detect},
                                                 {"verify", Mode::Verify},
                                                 {"experiment", Mode::Experiment}};
  std::optional<Mode> chosen;
  for (const auto& [name, mode] : modes) {
    CLI::App* sub = app.add_subcommand(name, std::string("run in ") + name + " mode");
    sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--workers", workers, "worker threads (overrides config)")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->callback([&chosen, mode = mode] { chosen = mode; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return execute(*chosen, config_path, seed, workers, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
