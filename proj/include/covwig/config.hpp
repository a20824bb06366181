#pragma once

// Experiment configuration: a single JSON document. Every section is
// optional and falls back to the defaults below; unknown keys and
// ill-typed values are ConfigErrors naming the dotted field path.
//
// {
//   "mode": "verify",                      sample | reduce | detect | verify | experiment
//   "seed": 1, "trials": 200, "workers": 1,
//   "output_dir": "out",
//   "model": {"type": "sc", "d": 40, "k": 6, "n": 3163, "theta": 0.0,
//             "lambda": 0.0, "fixed_spike_norm": false, "input": ""},
//   "reduction": {"type": "clone_cov", "alpha": 0.5, "epsilon": 0.5},
//   "detect": {"type": "spectral", "c": 0.5},
//   "verify": {"batteries": ["clone_cov_null"], "level": 0.01, "c1": 64.0,
//              "c2": 2.0, "epsilon": 0.5, "correlation_pairs": 64,
//              "denoise_max_n": 10, "denoise_draws": 100000},
//   "experiment": {"type": "transfer", "recovery": false, "null_only": false,
//                  "calibration_trials": 200, "false_alarm": 0.02,
//                  "max_error": 0.1, "loss_margin": 0.1,
//                  "alphas": [0.5], "betas": [0.0], "gamma": 2.5}
// }

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace covwig {

enum class Mode { Sample, Reduce, Detect, Verify, Experiment };

struct ModelConfig {
  std::string type = "sc";  // sc | wig
  int d = 40;
  int k = 6;
  int n = 3163;
  double theta = 0.0;
  double lambda = 0.0;
  bool fixed_spike_norm = false;
  std::string input;  // optional matrix file (binary or .csv) for reduce/detect

  bool operator==(const ModelConfig&) const = default;
};

struct ReductionConfig {
  // clone_cov | spcov_to_spwig | subsample | pad | reflection | sample_double
  std::string type = "clone_cov";
  double alpha = 0.5;
  double epsilon = 0.5;

  bool operator==(const ReductionConfig&) const = default;
};

struct DetectConfig {
  std::string type = "spectral";  // spectral | threshold
  double c = 0.5;

  bool operator==(const DetectConfig&) const = default;
};

struct VerifyConfig {
  // denoise | clone_cov_null | wishart_clt | gs_perturb
  std::vector<std::string> batteries = {"clone_cov_null"};
  double level = 0.01;
  double c1 = 64.0;
  double c2 = 2.0;
  double epsilon = 0.5;
  int correlation_pairs = 64;
  int denoise_max_n = 10;
  int denoise_draws = 100000;

  bool operator==(const VerifyConfig&) const = default;
};

struct ExperimentSection {
  std::string type = "transfer";  // transfer | phase_sweep
  bool recovery = false;
  bool null_only = false;
  int calibration_trials = 200;
  double false_alarm = 0.02;
  double max_error = 0.1;
  double loss_margin = 0.1;
  std::vector<double> alphas = {0.5};
  std::vector<double> betas = {0.0};
  double gamma = 2.5;

  bool operator==(const ExperimentSection&) const = default;
};

struct ExperimentConfig {
  Mode mode = Mode::Verify;
  std::uint64_t seed = 1;
  int trials = 200;
  int workers = 1;
  std::string output_dir = "out";
  ModelConfig model;
  ReductionConfig reduction;
  DetectConfig detect;
  VerifyConfig verify;
  ExperimentSection experiment;

  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_string(Mode mode);

/// Parses and validates; throws ConfigError with the offending field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);

/// Full canonical form with every field present.
nlohmann::json to_json(const ExperimentConfig& config);
std::string serialize_config(const ExperimentConfig& config);

/// Checks every parameter combination the configured mode will touch.
void validate_config(const ExperimentConfig& config);

}  // namespace covwig
