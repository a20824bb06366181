#include "covwig/primitives.hpp"

#include <cmath>

#include "covwig/core.hpp"
#include "covwig/errors.hpp"

namespace covwig {

ClonePair gauss_clone(const Matrix& z, Rng& rng) {
  const Matrix g = rng.normal_matrix(z.rows(), z.cols());
  const double s = 1.0 / std::sqrt(2.0);
  return ClonePair{(z + g) * s, (z - g) * s};
}

CloneSet gauss_clone_rep(const Matrix& z, int K, Rng& rng) {
  if (K < 1) throw PreconditionError("gauss_clone_rep: K must be >= 1");
  const int rounds = ceil_log2(K);
  std::vector<Matrix> copies{z};
  for (int t = 0; t < rounds; ++t) {
    std::vector<Matrix> next;
    next.reserve(copies.size() * 2);
    for (const Matrix& c : copies) {
      ClonePair pair = gauss_clone(c, rng);
      next.push_back(std::move(pair.first));
      next.push_back(std::move(pair.second));
    }
    copies = std::move(next);
  }
  copies.resize(static_cast<std::size_t>(K));
  return CloneSet{std::move(copies), static_cast<double>(1LL << rounds)};
}

OrthoBasis gram_schmidt(const Matrix& m) {
  const Eigen::Index n = m.rows();
  const Eigen::Index d = m.cols();
  if (n < d) throw PreconditionError("gram_schmidt: need n >= d");
  const double floor_norm = 1e-10 * std::sqrt(static_cast<double>(n));

  OrthoBasis out{Matrix(n, d), Vector(d)};
  Vector coeffs;
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector residual = m.col(i);
    if (i > 0) {
      // Classical variant: every projection coefficient uses the raw column.
      coeffs.noalias() = out.q.leftCols(i).transpose() * m.col(i);
      residual.noalias() -= out.q.leftCols(i) * coeffs;
    }
    const double norm = residual.norm();
    if (!(norm > floor_norm)) {
      throw RankDeficiencyError(static_cast<int>(i), norm);
    }
    out.q.col(i) = residual / norm;
    out.norms[i] = norm;
  }
  return out;
}

int denoise_block_start(int M, int i) { return ((2 * M + 1) * i - i * i) / 2; }

double denoise_factor_mean(int M, int i, double a) {
  if (i == 0) return 1.0;
  // binom(M, i) in floating point; M stays small in every caller.
  double binom = 1.0;
  for (int j = 1; j <= i; ++j) binom = binom * (M - i + j) / j;
  return -a * std::pow(binom, 1.0 / i);
}

int denoise(std::span<const int> bits, double a, Rng& rng) {
  if (bits.empty()) throw PreconditionError("denoise: need at least one input");
  const int M = denoise_order(static_cast<int>(bits.size()));
  if (!(std::abs(a) <= 1.0 / M)) {
    throw PreconditionError("denoise: |a| must be <= 1/M");
  }

  std::vector<int> y(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    const double w_mean = denoise_factor_mean(M, i, a);
    if (std::abs(w_mean) > 1.0 + 1e-12) {
      throw PreconditionError("denoise: fresh factor mean outside [-1, 1]");
    }
    int product = 1;
    const int start = denoise_block_start(M, i);
    for (int t = start; t < start + M - i; ++t) product *= bits[static_cast<std::size_t>(t)];
    for (int t = 0; t < i; ++t) product *= rng.rademacher(w_mean);
    y[static_cast<std::size_t>(i)] = product;
  }
  const int chosen = y[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(M)))];
  return (M % 2 == 1) ? chosen : -chosen;
}

double gaussianize_window(double p, int n) {
  return std::sqrt(6.0 * std::log(static_cast<double>(n)) + 2.0 * std::log(1.0 / p));
}

double gaussianize_mean(double p, int n) {
  if (n < 2) throw DomainError("gaussianize: n must be >= 2");
  if (!(p > 0.0 && p < 0.5)) throw DomainError("gaussianize: p must lie in (0, 1/2)");
  return p / (2.0 * gaussianize_window(p, n));
}

double gaussianize_rad(int x, double p, int n, Rng& rng) {
  if (x != 1 && x != -1) throw PreconditionError("gaussianize_rad: input must be +-1");
  if (n < 2) throw DomainError("gaussianize_rad: n must be >= 2");
  if (!(p < 0.5) || !(p >= std::pow(static_cast<double>(n), -8.0))) {
    throw DomainError("gaussianize_rad: p must lie in [n^-8, 1/2)");
  }
  const double mu = gaussianize_mean(p, n);
  const double window = gaussianize_window(p, n);
  const double shift = -0.5 * mu * mu;

  // Bern(1/2 + p) <-> x = +1. On |z| <= window the likelihood ratio
  // L = N(mu,1)/N(0,1) satisfies |L - 1| < 2p, so both mixture components
  //   (L - 1) / (2p) + 1   (x = +1)   and   1 - (L - 1) / (2p)   (x = -1)
  // are nonnegative densities relative to N(0,1); each is sampled by
  // rejection against its maximum on the window.
  const double sign = (x == 1) ? 1.0 : -1.0;
  const double lo = std::expm1(-mu * window + shift);
  const double hi = std::expm1(mu * window + shift);
  const double bound = 1.0 + std::max(sign * lo, sign * hi) / (2.0 * p);

  const int iterations = static_cast<int>(std::ceil(6.0 * std::log(static_cast<double>(n))));
  for (int it = 0; it < iterations; ++it) {
    const double z = rng.normal();
    if (std::abs(z) > window) continue;
    const double ratio = 1.0 + sign * std::expm1(mu * z + shift) / (2.0 * p);
    if (rng.uniform() * bound < ratio) return z;
  }
  return 0.0;
}

}  // namespace covwig
