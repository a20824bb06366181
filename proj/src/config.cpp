#include "covwig/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "covwig/core.hpp"
#include "covwig/errors.hpp"

namespace covwig {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void read(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      const auto wide = v->get<long long>();
      if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
        fail(key, "integer out of range");
      }
      out = static_cast<int>(wide);
    }
  }
  void read(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_integer() && v->get<long long>() >= 0) {
        out = static_cast<std::uint64_t>(v->get<long long>());
      } else {
        fail(key, "expected a non-negative integer");
      }
    }
  }
  void read(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "expected a finite number");
    }
  }
  void read(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }
  void read(const char* key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array of strings");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string()) fail(key, "element " + std::to_string(i) + " is not a string");
        out.push_back((*v)[i].get<std::string>());
      }
    }
  }
  void read(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) fail(key, "element " + std::to_string(i) + " is not a number");
        out.push_back((*v)[i].get<double>());
      }
    }
  }
  template <typename Fn>
  void nested(const char* key, Fn&& fn) {
    if (const json* v = find(key)) {
      Section inner(*v, join(path_, key));
      fn(inner);
      inner.finish();
    }
  }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(join(path_, key), msg);
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

Mode parse_mode(const std::string& text) {
  if (text == "sample") return Mode::Sample;
  if (text == "reduce") return Mode::Reduce;
  if (text == "detect") return Mode::Detect;
  if (text == "verify") return Mode::Verify;
  if (text == "experiment") return Mode::Experiment;
  throw ConfigError("mode", "expected sample|reduce|detect|verify|experiment, got '" + text + "'");
}

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

bool one_of(const std::string& value, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return value == o; });
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Sample: return "sample";
    case Mode::Reduce: return "reduce";
    case Mode::Detect: return "detect";
    case Mode::Verify: return "verify";
    case Mode::Experiment: return "experiment";
  }
  return "verify";
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section root(doc, "");
  std::string mode = to_string(c.mode);
  root.read("mode", mode);
  c.mode = parse_mode(mode);
  root.read("seed", c.seed);
  root.read("trials", c.trials);
  root.read("workers", c.workers);
  root.read("output_dir", c.output_dir);
  root.nested("model", [&](Section& s) {
    s.read("type", c.model.type);
    s.read("d", c.model.d);
    s.read("k", c.model.k);
    s.read("n", c.model.n);
    s.read("theta", c.model.theta);
    s.read("lambda", c.model.lambda);
    s.read("fixed_spike_norm", c.model.fixed_spike_norm);
    s.read("input", c.model.input);
  });
  root.nested("reduction", [&](Section& s) {
    s.read("type", c.reduction.type);
    s.read("alpha", c.reduction.alpha);
    s.read("epsilon", c.reduction.epsilon);
  });
  root.nested("detect", [&](Section& s) {
    s.read("type", c.detect.type);
    s.read("c", c.detect.c);
  });
  root.nested("verify", [&](Section& s) {
    s.read("batteries", c.verify.batteries);
    s.read("level", c.verify.level);
    s.read("c1", c.verify.c1);
    s.read("c2", c.verify.c2);
    s.read("epsilon", c.verify.epsilon);
    s.read("correlation_pairs", c.verify.correlation_pairs);
    s.read("denoise_max_n", c.verify.denoise_max_n);
    s.read("denoise_draws", c.verify.denoise_draws);
  });
  root.nested("experiment", [&](Section& s) {
    s.read("type", c.experiment.type);
    s.read("recovery", c.experiment.recovery);
    s.read("null_only", c.experiment.null_only);
    s.read("calibration_trials", c.experiment.calibration_trials);
    s.read("false_alarm", c.experiment.false_alarm);
    s.read("max_error", c.experiment.max_error);
    s.read("loss_margin", c.experiment.loss_margin);
    s.read("alphas", c.experiment.alphas);
    s.read("betas", c.experiment.betas);
    s.read("gamma", c.experiment.gamma);
  });
  root.finish();
  validate_config(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  return {
      {"mode", to_string(c.mode)},
      {"seed", c.seed},
      {"trials", c.trials},
      {"workers", c.workers},
      {"output_dir", c.output_dir},
      {"model",
       {{"type", c.model.type},
        {"d", c.model.d},
        {"k", c.model.k},
        {"n", c.model.n},
        {"theta", c.model.theta},
        {"lambda", c.model.lambda},
        {"fixed_spike_norm", c.model.fixed_spike_norm},
        {"input", c.model.input}}},
      {"reduction",
       {{"type", c.reduction.type}, {"alpha", c.reduction.alpha}, {"epsilon", c.reduction.epsilon}}},
      {"detect", {{"type", c.detect.type}, {"c", c.detect.c}}},
      {"verify",
       {{"batteries", c.verify.batteries},
        {"level", c.verify.level},
        {"c1", c.verify.c1},
        {"c2", c.verify.c2},
        {"epsilon", c.verify.epsilon},
        {"correlation_pairs", c.verify.correlation_pairs},
        {"denoise_max_n", c.verify.denoise_max_n},
        {"denoise_draws", c.verify.denoise_draws}}},
      {"experiment",
       {{"type", c.experiment.type},
        {"recovery", c.experiment.recovery},
        {"null_only", c.experiment.null_only},
        {"calibration_trials", c.experiment.calibration_trials},
        {"false_alarm", c.experiment.false_alarm},
        {"max_error", c.experiment.max_error},
        {"loss_margin", c.experiment.loss_margin},
        {"alphas", c.experiment.alphas},
        {"betas", c.experiment.betas},
        {"gamma", c.experiment.gamma}}},
  };
}

std::string serialize_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

void validate_config(const ExperimentConfig& c) {
  require(c.trials >= 1, "trials", "must be >= 1");
  require(c.workers >= 1, "workers", "must be >= 1");

  const ModelConfig& m = c.model;
  require(one_of(m.type, {"sc", "wig"}), "model.type", "expected sc or wig");
  require(m.d >= 1, "model.d", "must be >= 1");
  require(m.k >= 1 && m.k <= m.d, "model.k", "need 1 <= k <= d");
  require(m.theta >= 0.0, "model.theta", "must be >= 0");
  require(m.lambda >= 0.0, "model.lambda", "must be >= 0");
  if (m.type == "sc") require(m.n >= m.d, "model.n", "need n >= d");

  const ReductionConfig& r = c.reduction;
  require(one_of(r.type, {"clone_cov", "spcov_to_spwig", "subsample", "pad", "reflection", "sample_double"}),
          "reduction.type",
          "expected clone_cov|spcov_to_spwig|subsample|pad|reflection|sample_double");
  require(r.alpha > 0.0 && r.alpha <= 0.5, "reduction.alpha", "must lie in (0, 1/2]");
  require(r.epsilon > 0.0, "reduction.epsilon", "must be > 0");

  require(one_of(c.detect.type, {"spectral", "threshold"}), "detect.type", "expected spectral or threshold");

  const VerifyConfig& v = c.verify;
  require(v.level > 0.0 && v.level < 1.0, "verify.level", "must lie in (0, 1)");
  require(v.c1 > 0.0, "verify.c1", "must be > 0");
  require(v.c2 >= 0.0, "verify.c2", "must be >= 0");
  require(v.epsilon > 0.0, "verify.epsilon", "must be > 0");
  require(v.correlation_pairs >= 0, "verify.correlation_pairs", "must be >= 0");
  require(v.denoise_max_n >= 1 && v.denoise_max_n <= 12, "verify.denoise_max_n", "must lie in [1, 12]");
  require(v.denoise_draws >= 100, "verify.denoise_draws", "must be >= 100");
  for (std::size_t i = 0; i < v.batteries.size(); ++i) {
    require(one_of(v.batteries[i], {"denoise", "clone_cov_null", "wishart_clt", "gs_perturb"}),
            "verify.batteries[" + std::to_string(i) + "]",
            "expected denoise|clone_cov_null|wishart_clt|gs_perturb");
  }

  const ExperimentSection& e = c.experiment;
  require(one_of(e.type, {"transfer", "phase_sweep"}), "experiment.type", "expected transfer or phase_sweep");
  require(e.calibration_trials >= 10, "experiment.calibration_trials", "must be >= 10");
  require(e.false_alarm > 0.0 && e.false_alarm < 1.0, "experiment.false_alarm", "must lie in (0, 1)");
  require(e.max_error >= 0.0, "experiment.max_error", "must be >= 0");
  require(e.loss_margin >= 0.0, "experiment.loss_margin", "must be >= 0");
  for (std::size_t i = 0; i < e.alphas.size(); ++i) {
    require(e.alphas[i] > 0.0 && e.alphas[i] < 1.0, "experiment.alphas[" + std::to_string(i) + "]",
            "must lie in (0, 1)");
  }
  require(e.gamma >= 1.0, "experiment.gamma", "must be >= 1 so that n >= d");

  // Mode-specific combinations.
  const bool needs_sc = c.mode == Mode::Reduce || (c.mode == Mode::Experiment && e.type == "transfer");
  if (needs_sc) require(m.type == "sc", "model.type", "this mode needs an sc model");
  if (c.mode == Mode::Reduce && r.type == "reflection") {
    require(m.d % 2 == 0, "model.d", "reflection needs an even d");
  }
  if ((c.mode == Mode::Reduce || (c.mode == Mode::Experiment && e.type == "transfer")) &&
      r.type == "spcov_to_spwig") {
    try {
      derive_constants(r.alpha, r.epsilon, m.theta, m.n, m.k);
    } catch (const PsiRangeError& err) {
      throw ConfigError("model.theta", err.what());
    }
  }
  if (c.mode == Mode::Experiment && e.type == "transfer") {
    require(one_of(r.type, {"clone_cov", "spcov_to_spwig"}), "reduction.type",
            "transfer experiment needs clone_cov or spcov_to_spwig");
    if (e.recovery) require(m.n >= 2 * m.d, "model.n", "recovery splits rows in half; need n >= 2d");
  }
  if (c.mode == Mode::Experiment && e.type == "phase_sweep") {
    require(!e.alphas.empty(), "experiment.alphas", "must not be empty");
    require(!e.betas.empty(), "experiment.betas", "must not be empty");
  }
  if (c.mode == Mode::Verify) {
    require(!v.batteries.empty(), "verify.batteries", "must not be empty");
    for (const std::string& b : v.batteries) {
      if (b == "clone_cov_null" || b == "wishart_clt" || b == "gs_perturb") {
        require(m.type == "sc", "model.type", "battery " + b + " needs an sc model");
      }
      if (b == "clone_cov_null" || b == "wishart_clt") {
        require(c.trials >= 30, "trials", "batteries need at least 30 trials");
      }
      if (b == "gs_perturb") {
        require(static_cast<double>(m.n) >= std::pow(static_cast<double>(m.d), 1.0 + v.epsilon),
                "verify.epsilon", "gs_perturb needs n >= d^{1+epsilon}");
        const Thresholds th = thresholds(m.d, m.k, m.n);
        require(m.theta == 0.0 || (m.theta >= th.theta_stat && m.theta < th.theta_comp), "model.theta",
                "gs_perturb needs theta == 0 or theta_stat <= theta < theta_comp");
      }
    }
  }
}

}  // namespace covwig
