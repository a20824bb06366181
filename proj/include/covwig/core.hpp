#pragma once

// Parameter algebra for the spiked covariance (SC) and spiked Wigner (SpWig)
// models: exponent points, threshold formulas, the canonical SNR map
// lambda <-> theta * sqrt(n), phase-diagram regions and the tuning constants
// of the Gram-Schmidt reduction.
//
// All functions here are pure.

#include <optional>
#include <string_view>

namespace covwig {

/// Exponents of (k, SNR, n) as powers of d. `gamma` is present for SC points
/// and absent for SpWig points.
struct ExponentPoint {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> gamma;

  void validate() const;
};

struct ScParams {
  int d = 1;
  int k = 1;
  double theta = 0.0;  // 0 encodes the null hypothesis
  int n = 1;

  void validate() const;
};

struct WigParams {
  int d = 1;
  int k = 1;
  double lambda = 0.0;  // 0 encodes the null hypothesis

  void validate() const;
};

struct Thresholds {
  double theta_comp = 0.0;
  double theta_stat = 0.0;
  double lambda_comp = 0.0;
  double lambda_stat = 0.0;
};

/// Tuning constants of spcov_to_spwig for a target (alpha, epsilon).
struct DerivedConstants {
  double A = 0.0;
  int K = 0;    // flipped copies per entry fed to denoise
  int C = 0;    // total SNR divisor of each coefficient copy, a power of two
  double psi = 0.0;
  int M = 0;    // denoise order for K inputs
};

enum class Region { Easy, Hard, Impossible };

std::string_view to_string(Region region);

/// (alpha, beta, gamma) -> (alpha, beta + gamma/2).
ExponentPoint canonical_map(const ExponentPoint& mu);

/// SNR thresholds at concrete (d, k, n); requires 1 <= k <= d <= n.
Thresholds thresholds(int d, int k, int n);

/// Computational boundary exponent. SC points: min{alpha, 1/2} - gamma/2;
/// SpWig points: min{alpha, 1/2}.
double beta_comp(const ExponentPoint& mu);
/// Statistical boundary exponent: alpha/2 - gamma/2 (SC) or alpha/2 (SpWig).
double beta_stat(const ExponentPoint& mu);

/// Exact boundary points go to the closed Easy/Impossible side.
Region classify_region(const ExponentPoint& mu);

DerivedConstants derive_constants(double alpha, double epsilon, double theta,
                                  int n, int k);

/// Largest M with M(M+1)/2 <= N, i.e. floor((sqrt(1+8N)-1)/2) in integers.
int denoise_order(int N);

/// Smallest t with 2^t >= K (0 for K == 1).
int ceil_log2(long long K);

}  // namespace covwig
