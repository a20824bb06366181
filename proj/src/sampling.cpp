#include "covwig/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covwig/errors.hpp"

namespace covwig {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key),
                    static_cast<std::uint32_t>(key >> 32)};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw PreconditionError("Rng::below: n must be positive");
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  double* p = m.data();
  for (Eigen::Index i = 0, size = m.size(); i < size; ++i) p[i] = normal();
  return m;
}

Vector Rng::normal_vector(Eigen::Index size) {
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = normal();
  return v;
}

SeedStream::SeedStream(std::uint64_t master_seed,
                       std::vector<std::uint64_t> path)
    : master_seed_(master_seed), path_(std::move(path)) {}

SeedStream SeedStream::child(std::uint64_t index) const {
  auto path = path_;
  path.push_back(index);
  return SeedStream(master_seed_, std::move(path));
}

SeedStream SeedStream::child(std::initializer_list<std::uint64_t> indices) const {
  auto path = path_;
  path.insert(path.end(), indices.begin(), indices.end());
  return SeedStream(master_seed_, std::move(path));
}

std::uint64_t SeedStream::key() const {
  std::uint64_t h = splitmix64(master_seed_ ^ 0x5851F42D4C957F2DULL);
  for (std::size_t level = 0; level < path_.size(); ++level) {
    h = splitmix64(h ^ splitmix64(path_[level] + 0x632BE59BD9B4E019ULL * (level + 1)));
  }
  return h;
}

bool SparseSignal::contains(int index) const {
  return std::binary_search(support.begin(), support.end(), index);
}

double SparseSignal::entry(int index) const {
  auto it = std::lower_bound(support.begin(), support.end(), index);
  if (it == support.end() || *it != index) return 0.0;
  return signs[static_cast<std::size_t>(it - support.begin())] /
         std::sqrt(static_cast<double>(k()));
}

Vector SparseSignal::dense() const {
  Vector v = Vector::Zero(d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    v[support[i]] = signs[i] * scale;
  }
  return v;
}

SparseSignal SparseSignal::abs() const {
  SparseSignal out = *this;
  std::fill(out.signs.begin(), out.signs.end(), 1);
  return out;
}

SparseSignal sample_sparse_signal(int d, int k, Rng& rng) {
  if (d < 1 || k < 1 || k > d) {
    throw DomainError("sample_sparse_signal: need 1 <= k <= d");
  }
  // Partial Fisher-Yates over the index set.
  std::vector<int> indices(static_cast<std::size_t>(d));
  std::iota(indices.begin(), indices.end(), 0);
  for (int j = 0; j < k; ++j) {
    const auto src = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - j)));
    std::swap(indices[j], indices[src]);
  }
  SparseSignal u;
  u.d = d;
  u.support.assign(indices.begin(), indices.begin() + k);
  std::sort(u.support.begin(), u.support.end());
  u.signs.resize(static_cast<std::size_t>(k));
  for (auto& s : u.signs) s = rng.rademacher(0.0);
  return u;
}

Matrix sample_goe(int d, Rng& rng) {
  if (d < 1) throw DomainError("sample_goe: d must be >= 1");
  const Matrix a = rng.normal_matrix(d, d);
  Matrix w = (a + a.transpose()) / std::sqrt(2.0);
  // Bitwise symmetry regardless of how the sum above was evaluated.
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i) w(j, i) = w(i, j);
  }
  return w;
}

ScSample sample_sc_with_signal(const ScParams& params, const SparseSignal& u,
                               bool fixed_spike_norm, Rng& rng) {
  params.validate();
  if (u.d != params.d || u.k() != params.k) {
    throw DomainError("sample_sc: signal shape does not match params");
  }
  ScSample out;
  out.data = rng.normal_matrix(params.n, params.d);
  Vector g = rng.normal_vector(params.n);
  if (fixed_spike_norm) g *= std::sqrt(static_cast<double>(params.n)) / g.norm();
  if (params.theta > 0.0) {
    out.data.noalias() += std::sqrt(params.theta) * g * u.dense().transpose();
  }
  out.truth = ScTruth{u, std::move(g), params.theta};
  return out;
}

ScSample sample_sc(const ScParams& params, bool fixed_spike_norm, Rng& rng) {
  params.validate();
  SparseSignal u = sample_sparse_signal(params.d, params.k, rng);
  return sample_sc_with_signal(params, u, fixed_spike_norm, rng);
}

WigSample sample_wig(const WigParams& params, Rng& rng) {
  params.validate();
  SparseSignal u = sample_sparse_signal(params.d, params.k, rng);
  WigSample out;
  out.data = sample_goe(params.d, rng);
  if (params.lambda > 0.0) {
    const Vector v = u.dense();
    for (int j = 0; j < params.d; ++j) {
      for (int i = 0; i < params.d; ++i) out.data(i, j) += params.lambda * (v[i] * v[j]);
    }
  }
  out.truth = WigTruth{std::move(u), params.lambda};
  return out;
}

}  // namespace covwig
