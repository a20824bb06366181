#pragma once

// Seed-stream driven samplers for sparse signals, GOE noise and both planted
// models. Every draw is a function of (master seed, path), so trials can be
// scheduled on any number of workers without changing a single bit.

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

#include "covwig/core.hpp"

namespace covwig {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Rng {
 public:
  explicit Rng(std::uint64_t key);

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// +1 with probability (1 + mean) / 2, else -1.
  int rademacher(double mean) { return uniform() < 0.5 * (1.0 + mean) ? 1 : -1; }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  Vector normal_vector(Eigen::Index size);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Counter-style seed derivation: the generator key is a hash of the master
/// seed and the path, never the state of a parent generator.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t master_seed,
                      std::vector<std::uint64_t> path = {});

  SeedStream child(std::uint64_t index) const;
  SeedStream child(std::initializer_list<std::uint64_t> indices) const;

  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }
  std::uint64_t key() const;
  Rng rng() const { return Rng(key()); }

 private:
  std::uint64_t master_seed_;
  std::vector<std::uint64_t> path_;
};

/// k-sparse unit vector with entries sign * k^{-1/2} on `support`.
/// Child index reserved for harness-internal draws such as pair sampling
/// and fixed planted signals.
inline constexpr std::uint64_t kAuxIndex = 0xffffffffULL;

struct SparseSignal {
  int d = 0;
  std::vector<int> support;  // strictly increasing
  std::vector<int> signs;    // +-1, aligned with support

  int k() const { return static_cast<int>(support.size()); }
  bool contains(int index) const;
  /// Signed entry at `index` (0 off support).
  double entry(int index) const;
  Vector dense() const;
  /// Same support with all signs +1.
  SparseSignal abs() const;
};

struct ScTruth {
  SparseSignal u;
  Vector g;
  double theta = 0.0;
};

struct ScSample {
  Matrix data;  // n x d
  std::optional<ScTruth> truth;
};

struct WigTruth {
  SparseSignal u;
  double lambda = 0.0;
};

struct WigSample {
  Matrix data;  // d x d, exactly symmetric
  std::optional<WigTruth> truth;
};

SparseSignal sample_sparse_signal(int d, int k, Rng& rng);

/// (A + A^T) / sqrt(2) with A iid N(0, 1).
Matrix sample_goe(int d, Rng& rng);

/// Z = X + sqrt(theta) g u^T. With `fixed_spike_norm`, g is rescaled so that
/// ||g||^2 = n.
ScSample sample_sc(const ScParams& params, bool fixed_spike_norm, Rng& rng);

/// Same as sample_sc with a caller-chosen signal.
ScSample sample_sc_with_signal(const ScParams& params, const SparseSignal& u,
                               bool fixed_spike_norm, Rng& rng);

/// Y = lambda u u^T + W, W ~ GOE(d).
WigSample sample_wig(const WigParams& params, Rng& rng);

}  // namespace covwig
