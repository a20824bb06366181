#include "covwig/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "covwig/errors.hpp"

namespace covwig {
namespace {

DetectorOutcome decide(double statistic, double threshold) {
  return {statistic > threshold ? Decision::Planted : Decision::Null, statistic, threshold};
}

double max_offdiag_abs(const Matrix& y) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (i != j) best = std::max(best, std::abs(y(i, j)));
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Decision decision) {
  return decision == Decision::Planted ? "planted" : "null";
}

EigenPair top_eigenpair(const Matrix& y) {
  if (y.rows() != y.cols() || y.rows() < 1) {
    throw PreconditionError("top_eigenpair: need a nonempty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(y);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("top_eigenpair: eigensolver did not converge");
  }
  const Eigen::Index last = y.rows() - 1;
  EigenPair out{solver.eigenvalues()[last], solver.eigenvectors().col(last)};
  Eigen::Index pivot = 0;
  out.vector.cwiseAbs().maxCoeff(&pivot);
  if (out.vector[pivot] < 0.0) out.vector = -out.vector;
  return out;
}

DetectorOutcome threshold_detect_wig(const Matrix& y, int /*k*/, double c) {
  const double d = static_cast<double>(y.rows());
  return decide(max_offdiag_abs(y), c * std::sqrt(std::log(d)));
}

DetectorOutcome spectral_detect_wig(const Matrix& y, double c) {
  const double d = static_cast<double>(y.rows());
  return decide(top_eigenpair(y).value / std::sqrt(d), 2.0 + c);
}

Matrix rescaled_covariance(const Matrix& z) {
  if (z.rows() < 1) throw PreconditionError("rescaled_covariance: need n >= 1");
  const double n = static_cast<double>(z.rows());
  Matrix cov = z.transpose() * z / n;
  cov.diagonal().array() -= 1.0;
  return cov * std::sqrt(n);
}

DetectorOutcome covariance_detect_sc(const Matrix& z, int k, double c) {
  return threshold_detect_wig(rescaled_covariance(z), k, c);
}

RecoveryEstimate recover_topk(const Matrix& y, int k) {
  if (k < 1 || k > y.rows()) throw PreconditionError("recover_topk: need 1 <= k <= d");
  const Vector v = top_eigenpair(y).vector;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  Vector u_hat = Vector::Zero(v.size());
  for (int t = 0; t < k; ++t) u_hat[order[static_cast<std::size_t>(t)]] = v[order[static_cast<std::size_t>(t)]];
  const double norm = u_hat.norm();
  if (!(norm > 0.0)) {
    // Only reachable for a degenerate eigenvector; fall back to the top
    // coordinate so the output is still a unit k-sparse vector.
    u_hat.setZero();
    u_hat[order.front()] = 1.0;
  } else {
    u_hat /= norm;
  }
  return RecoveryEstimate{std::move(u_hat), std::nullopt};
}

double loss(const Vector& u, const Vector& u_hat) {
  if (u.size() != u_hat.size()) throw DomainError("loss: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(u_hat.norm() - 1.0) > 1e-9) {
    throw DomainError("loss: arguments must be unit vectors");
  }
  const double overlap = u.dot(u_hat);
  return std::clamp(1.0 - overlap * overlap, 0.0, 1.0);
}

double loss(const SparseSignal& u, const Vector& u_hat) { return loss(u.dense(), u_hat); }

}  // namespace covwig
