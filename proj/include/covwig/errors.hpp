#pragma once

#include <stdexcept>
#include <string>

namespace covwig {

/// A parameter lies outside the domain where a formula or model is defined.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called with inputs that violate its stated precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The denoising parameter psi exceeds 1/M; the caller should lower theta.
class PsiRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Gram-Schmidt residual collapsed at `column`.
class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(int column, double residual_norm);
  int column() const { return column_; }
  double residual_norm() const { return residual_norm_; }

 private:
  int column_;
  double residual_norm_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. `field()` is the dotted path of the
/// offending key, e.g. "model.k".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// File could not be read or written, or its contents are malformed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covwig
