#pragma once

// Baseline detectors and recovery for both models, and the recovery loss.

#include <optional>
#include <string_view>

#include "covwig/sampling.hpp"

namespace covwig {

enum class Decision { Null, Planted };

std::string_view to_string(Decision decision);

struct DetectorOutcome {
  Decision decision = Decision::Null;
  double statistic = 0.0;
  double threshold = 0.0;
};

struct RecoveryEstimate {
  Vector u_hat;  // unit norm, at most k nonzeros
  std::optional<double> loss_vs_truth;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;  // unit norm, sign fixed so its largest-magnitude entry is > 0
};

/// Largest (algebraic) eigenvalue and its eigenvector of a symmetric matrix.
EigenPair top_eigenpair(const Matrix& y);

/// max_{i != j} |Y_ij| against c * sqrt(ln d). `k` is carried so callers can
/// fold a sparsity-aware margin into `c`.
DetectorOutcome threshold_detect_wig(const Matrix& y, int k, double c);

/// Largest eigenvalue of Y / sqrt(d) against 2 + c.
DetectorOutcome spectral_detect_wig(const Matrix& y, double c);

/// sqrt(n) ((1/n) Z^T Z - I).
Matrix rescaled_covariance(const Matrix& z);

/// Off-diagonal entrywise maximum of rescaled_covariance(Z), thresholded as
/// in threshold_detect_wig.
DetectorOutcome covariance_detect_sc(const Matrix& z, int k, double c);

/// Leading eigenvector of Y restricted to its k largest-magnitude
/// coordinates, renormalized.
RecoveryEstimate recover_topk(const Matrix& y, int k);

/// 1 - <u, u_hat>^2; both arguments must be unit vectors.
double loss(const Vector& u, const Vector& u_hat);
double loss(const SparseSignal& u, const Vector& u_hat);

}  // namespace covwig
