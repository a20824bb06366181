#pragma once

// Reduction primitives: Gaussian cloning, classical Gram-Schmidt, Rademacher
// denoising and the rejection kernel lifting Rademacher bits to Gaussians.

#include <span>
#include <vector>

#include "covwig/sampling.hpp"

namespace covwig {

struct ClonePair {
  Matrix first;   // (Z + G) / sqrt(2)
  Matrix second;  // (Z - G) / sqrt(2)
};

/// Splits Z into two copies with independent noise, each carrying the planted
/// mean scaled by 1/sqrt(2).
ClonePair gauss_clone(const Matrix& z, Rng& rng);

struct CloneSet {
  std::vector<Matrix> copies;
  /// 2^{ceil(log2 K)}: the divisor applied to theta in every copy.
  double snr_scale = 1.0;
};

/// ceil(log2 K) rounds of binary cloning; keeps the first K copies.
CloneSet gauss_clone_rep(const Matrix& z, int K, Rng& rng);

struct OrthoBasis {
  Matrix q;       // n x d, orthonormal columns
  Vector norms;   // residual norm of each column before normalization
};

/// Classical (not modified) Gram-Schmidt in column order, no
/// re-orthogonalization. Throws RankDeficiencyError when a residual norm
/// falls to 1e-10 * sqrt(n) or below.
OrthoBasis gram_schmidt(const Matrix& m);

/// Rademacher denoising over N = bits.size() noisy +-1 inputs. With
/// M = denoise_order(N) and inputs iid Rad(a + delta), |delta| <= |a|, the
/// output is Rad(a^M / M + (-1)^{M+1} delta^M / M); Rad(0) inputs give Rad(0).
/// Requires |a| <= 1/M.
int denoise(std::span<const int> bits, double a, Rng& rng);

/// Start index (0-based) of block i of the denoise construction:
/// ((2M+1) i - i^2) / 2. Block i has length M - i.
int denoise_block_start(int M, int i);

/// Mean of the fresh Rademacher factors in block i: -a * binom(M, i)^{1/i}.
double denoise_factor_mean(int M, int i, double a);

/// mu = p / (2 sqrt(6 ln n + 2 ln(1/p))).
double gaussianize_mean(double p, int n);

/// Truncation half-width of the kernel: sqrt(6 ln n + 2 ln(1/p)).
double gaussianize_window(double p, int n);

/// Rejection kernel mapping x ~ Rad(2p) near N(mu, 1) and x ~ Rad(0) near
/// N(0, 1), with mu = gaussianize_mean(p, n). One code path for both
/// hypotheses. Requires n >= 2 and n^{-8} <= p < 1/2.
double gaussianize_rad(int x, double p, int n, Rng& rng);

}  // namespace covwig
