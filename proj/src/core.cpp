#include "covwig/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "covwig/errors.hpp"

namespace covwig {

RankDeficiencyError::RankDeficiencyError(int column, double residual_norm)
    : std::runtime_error("gram_schmidt: residual collapsed at column " +
                         std::to_string(column) + " (norm " +
                         std::to_string(residual_norm) + ")"),
      column_(column),
      residual_norm_(residual_norm) {}

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

void ExponentPoint::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("exponent point: alpha must lie in (0, 1)");
  }
  if (!std::isfinite(beta)) {
    throw DomainError("exponent point: beta must be finite");
  }
  if (gamma && !(*gamma >= 1.0)) {
    throw DomainError("exponent point: gamma must be >= 1");
  }
}

void ScParams::validate() const {
  if (d < 1 || k < 1 || k > d) {
    throw DomainError("sc params: need 1 <= k <= d");
  }
  if (n < d) throw DomainError("sc params: need n >= d");
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw DomainError("sc params: theta must be finite and >= 0");
  }
}

void WigParams::validate() const {
  if (d < 1 || k < 1 || k > d) {
    throw DomainError("wig params: need 1 <= k <= d");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("wig params: lambda must be finite and >= 0");
  }
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::Easy:
      return "easy";
    case Region::Hard:
      return "hard";
    case Region::Impossible:
      return "impossible";
  }
  return "unknown";
}

ExponentPoint canonical_map(const ExponentPoint& mu) {
  mu.validate();
  if (!mu.gamma) {
    throw DomainError("canonical_map: SC exponent point requires gamma");
  }
  return ExponentPoint{mu.alpha, mu.beta + *mu.gamma / 2.0, std::nullopt};
}

Thresholds thresholds(int d, int k, int n) {
  if (!(1 <= k && k <= d && d <= n)) {
    throw DomainError("thresholds: need 1 <= k <= d <= n");
  }
  const double dd = d, kk = k, nn = n;
  Thresholds t;
  t.theta_comp = std::min(kk / std::sqrt(nn), std::sqrt(dd / nn));
  t.theta_stat = std::sqrt(kk / nn);
  t.lambda_comp = std::min(kk, std::sqrt(dd));
  t.lambda_stat = std::sqrt(kk);
  return t;
}

double beta_comp(const ExponentPoint& mu) {
  mu.validate();
  const double shift = mu.gamma ? *mu.gamma / 2.0 : 0.0;
  return std::min(mu.alpha, 0.5) - shift;
}

double beta_stat(const ExponentPoint& mu) {
  mu.validate();
  const double shift = mu.gamma ? *mu.gamma / 2.0 : 0.0;
  return mu.alpha / 2.0 - shift;
}

Region classify_region(const ExponentPoint& mu) {
  const double comp = beta_comp(mu);
  const double stat = beta_stat(mu);
  if (mu.beta >= comp) return Region::Easy;
  if (mu.beta <= stat) return Region::Impossible;
  return Region::Hard;
}

int denoise_order(int N) {
  if (N < 1) throw PreconditionError("denoise_order: N must be >= 1");
  int M = 0;
  while (static_cast<long long>(M + 1) * (M + 2) / 2 <= N) ++M;
  return M;
}

int ceil_log2(long long K) {
  if (K < 1) throw PreconditionError("ceil_log2: K must be >= 1");
  int t = 0;
  while ((1LL << t) < K) ++t;
  return t;
}

DerivedConstants derive_constants(double alpha, double epsilon, double theta,
                                  int n, int k) {
  if (!(epsilon > 0.0)) throw DomainError("derive_constants: epsilon must be > 0");
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw DomainError("derive_constants: alpha must lie in (0, 1/2]");
  }
  if (!(theta >= 0.0)) throw DomainError("derive_constants: theta must be >= 0");
  if (n < 1 || k < 1) throw DomainError("derive_constants: need n, k >= 1");

  DerivedConstants c;
  c.A = std::max(2.0 * alpha / epsilon, 4.0 * alpha / (1.0 + epsilon));
  c.K = static_cast<int>(std::ceil(c.A * c.A + 3.0 * c.A + 4.0));
  c.C = 1 << (ceil_log2(2LL * c.K) + 1);
  c.M = denoise_order(c.K);
  c.psi = theta * theta * static_cast<double>(n) /
          (2.0 * c.C * static_cast<double>(k) * k);
  if (std::abs(c.psi) > 1.0 / c.M) {
    std::ostringstream msg;
    msg << "derive_constants: psi = " << c.psi << " exceeds 1/M = " << 1.0 / c.M
        << "; lower theta";
    throw PsiRangeError(msg.str());
  }
  return c;
}

}  // namespace covwig
