#pragma once

// Reductions from spiked covariance data (n x d) to spiked Wigner matrices
// (d x d), plus the dimension/sample bookkeeping reductions between SC
// instances. Reductions only ever see the data matrix, never the planted
// ground truth.

#include <optional>
#include <string>
#include <vector>

#include "covwig/primitives.hpp"

namespace covwig {

/// Clone once, take Y = Z1^T Z2 / sqrt(n), return (Y + Y^T) / sqrt(2).
/// For SC input the output mean is (theta sqrt(n) / sqrt(2)) u u^T when
/// ||g||^2 = n.
Matrix clone_cov(const Matrix& z, Rng& rng);

/// out_ij = out_ji = sign(ya_ij * yb_ji) for i <= j; zero products map to +1.
Matrix flip_combine(const Matrix& ya, const Matrix& yb);

struct PipelineConstants {
  int K = 0;               // flipped copies per entry
  int M = 0;               // denoise order of K
  double psi = 0.0;        // denoise parameter
  double gauss_p = 0.0;    // rejection-kernel bias psi^M / (2M)
  int n = 0;               // sample count used by the kernel
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ReductionTrace {
  PipelineConstants constants;
  std::vector<StageTiming> timings;

  // Retained only when requested.
  std::optional<CloneSet> clones;     // the 2K coefficient sources
  std::optional<OrthoBasis> basis;    // Gram-Schmidt of copy 0
  std::vector<Matrix> coefficients;   // Y^(l) = Z^(l)T Q, l = 1..2K
  std::vector<Matrix> flipped;        // K symmetric +-1 matrices
  std::optional<Matrix> denoised;     // symmetric +-1 matrix
};

struct SpWigReduction {
  Matrix output;
  ReductionTrace trace;
};

/// Clone, orthogonalize, flip, denoise and Gaussianize. `two_k` must be even
/// and |psi| <= 1/M with M = denoise_order(two_k / 2). Gaussianized diagonal
/// entries are multiplied by sqrt(2) to match the GOE diagonal variance.
SpWigReduction spcov_to_spwig(const Matrix& z, int two_k, double psi, Rng& rng,
                              bool keep_trace = false);

struct SubsampleResult {
  Matrix data;
  std::vector<bool> kept;
};

/// Keeps each column with probability 1/2, replacing the rest with fresh
/// N(0, I_n) columns.
SubsampleResult subsample_reduce(const Matrix& z, Rng& rng);
SubsampleResult subsample_reduce(const Matrix& z, const std::vector<bool>& keep,
                                 Rng& rng);

struct PadResult {
  Matrix data;                 // n x 2d
  std::vector<int> position;   // position[c] = output column of input column c
};

/// Appends d fresh N(0, I_n) columns and permutes all 2d columns uniformly.
PadResult pad_reduce(const Matrix& z, Rng& rng);

/// [A | B] -> [(A + B) / sqrt(2) | (A - B) / sqrt(2)]; d must be even.
Matrix reflection_clone(const Matrix& z);

/// Haar-distributed n x n orthogonal matrix.
Matrix haar_orthogonal(int n, Rng& rng);

/// Clone, rotate the second copy by a Haar orthogonal matrix and stack:
/// SC(d, k, theta, n) -> SC(d, k, theta / 2, 2n).
Matrix sample_double(const Matrix& z, Rng& rng);

}  // namespace covwig
