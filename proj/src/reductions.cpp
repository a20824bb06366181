#include "covwig/reductions.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

#include "covwig/core.hpp"
#include "covwig/errors.hpp"

namespace covwig {
namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}
  void mark(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Re-raise precondition/domain failures of a sub-operation with a stage label.
template <typename Fn>
auto labeled(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PsiRangeError& e) {
    throw PsiRangeError(std::string("spcov_to_spwig[") + stage + "]: " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string("spcov_to_spwig[") + stage + "]: " + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("spcov_to_spwig[") + stage + "]: " + e.what());
  } catch (const RankDeficiencyError& e) {
    throw NumericalError(std::string("spcov_to_spwig[") + stage + "]: " + e.what());
  }
}

void mirror_upper(Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) m(i, j) = m(j, i);
  }
}

}  // namespace

Matrix clone_cov(const Matrix& z, Rng& rng) {
  if (z.rows() < 1 || z.cols() < 1) throw PreconditionError("clone_cov: empty input");
  const ClonePair pair = gauss_clone(z, rng);
  const Matrix y = pair.first.transpose() * pair.second /
                   std::sqrt(static_cast<double>(z.rows()));
  Matrix sym(y.rows(), y.cols());
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) sym(i, j) = (y(i, j) + y(j, i)) * s;
  }
  mirror_upper(sym);
  return sym;
}

Matrix flip_combine(const Matrix& ya, const Matrix& yb) {
  if (ya.rows() != ya.cols() || ya.rows() != yb.rows() || ya.cols() != yb.cols()) {
    throw PreconditionError("flip_combine: need equal square shapes");
  }
  const Eigen::Index d = ya.rows();
  Matrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double product = ya(i, j) * yb(j, i);
      out(i, j) = product < 0.0 ? -1.0 : 1.0;
    }
  }
  mirror_upper(out);
  return out;
}

SpWigReduction spcov_to_spwig(const Matrix& z, int two_k, double psi, Rng& rng,
                              bool keep_trace) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  if (n < d || d < 1) throw PreconditionError("spcov_to_spwig: need n >= d >= 1");
  if (two_k < 2 || two_k % 2 != 0) {
    throw PreconditionError("spcov_to_spwig: 2K must be even and >= 2");
  }
  const int K = two_k / 2;
  const int M = denoise_order(K);
  if (!(std::abs(psi) <= 1.0 / M)) {
    throw PsiRangeError("spcov_to_spwig: |psi| must be <= 1/M");
  }

  SpWigReduction result;
  ReductionTrace& trace = result.trace;
  trace.constants = {K, M, psi, std::pow(psi, M) / (2.0 * M), static_cast<int>(n)};
  StageClock clock(trace.timings);

  // Clone into copy 0 (basis) and copy 1, then copy 1 into 2K copies.
  ClonePair first = gauss_clone(z, rng);
  CloneSet sources = labeled("clone", [&] { return gauss_clone_rep(first.second, two_k, rng); });
  clock.mark("clone");

  OrthoBasis basis = labeled("gram_schmidt", [&] { return gram_schmidt(first.first); });
  clock.mark("gram_schmidt");

  std::vector<Matrix> coefficients;
  coefficients.reserve(static_cast<std::size_t>(two_k));
  for (const Matrix& copy : sources.copies) {
    coefficients.push_back(copy.transpose() * basis.q);
  }
  clock.mark("coefficients");

  std::vector<Matrix> flipped;
  flipped.reserve(static_cast<std::size_t>(K));
  for (int l = 0; l < K; ++l) {
    flipped.push_back(flip_combine(coefficients[static_cast<std::size_t>(l)],
                                   coefficients[static_cast<std::size_t>(l + K)]));
  }
  clock.mark("flip");

  Matrix denoised(d, d);
  std::vector<int> bits(static_cast<std::size_t>(K));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      for (int l = 0; l < K; ++l) {
        bits[static_cast<std::size_t>(l)] = static_cast<int>(flipped[static_cast<std::size_t>(l)](i, j));
      }
      denoised(i, j) = labeled("denoise", [&] { return denoise(bits, psi, rng); });
    }
  }
  mirror_upper(denoised);
  clock.mark("denoise");

  const double p = trace.constants.gauss_p;
  const int kernel_n = static_cast<int>(n);
  Matrix out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const int x = static_cast<int>(denoised(i, j));
      double v = labeled("gaussianize", [&] { return gaussianize_rad(x, p, kernel_n, rng); });
      if (i == j) v *= std::sqrt(2.0);
      out(i, j) = v;
    }
  }
  mirror_upper(out);
  clock.mark("gaussianize");

  result.output = std::move(out);
  if (keep_trace) {
    trace.clones = std::move(sources);
    trace.basis = std::move(basis);
    trace.coefficients = std::move(coefficients);
    trace.flipped = std::move(flipped);
    trace.denoised = std::move(denoised);
  }
  return result;
}

SubsampleResult subsample_reduce(const Matrix& z, const std::vector<bool>& keep,
                                 Rng& rng) {
  if (keep.size() != static_cast<std::size_t>(z.cols())) {
    throw PreconditionError("subsample_reduce: mask length must equal d");
  }
  SubsampleResult out{z, keep};
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    if (!keep[static_cast<std::size_t>(c)]) out.data.col(c) = rng.normal_vector(z.rows());
  }
  return out;
}

SubsampleResult subsample_reduce(const Matrix& z, Rng& rng) {
  std::vector<bool> keep(static_cast<std::size_t>(z.cols()));
  for (std::size_t c = 0; c < keep.size(); ++c) keep[c] = rng.bernoulli(0.5);
  return subsample_reduce(z, keep, rng);
}

PadResult pad_reduce(const Matrix& z, Rng& rng) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  Matrix padded(n, 2 * d);
  padded.leftCols(d) = z;
  padded.rightCols(d) = rng.normal_matrix(n, d);

  // order[t] = source column placed at output position t.
  std::vector<int> order(static_cast<std::size_t>(2 * d));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t t = order.size(); t > 1; --t) {
    std::swap(order[t - 1], order[rng.below(t)]);
  }
  PadResult out{Matrix(n, 2 * d), std::vector<int>(static_cast<std::size_t>(d))};
  for (std::size_t t = 0; t < order.size(); ++t) {
    out.data.col(static_cast<Eigen::Index>(t)) = padded.col(order[t]);
    if (order[t] < d) out.position[static_cast<std::size_t>(order[t])] = static_cast<int>(t);
  }
  return out;
}

Matrix reflection_clone(const Matrix& z) {
  if (z.cols() % 2 != 0) throw DomainError("reflection_clone: d must be even");
  const Eigen::Index half = z.cols() / 2;
  const double s = 1.0 / std::sqrt(2.0);
  Matrix out(z.rows(), z.cols());
  out.leftCols(half) = (z.leftCols(half) + z.rightCols(half)) * s;
  out.rightCols(half) = (z.leftCols(half) - z.rightCols(half)) * s;
  return out;
}

Matrix haar_orthogonal(int n, Rng& rng) {
  if (n < 1) throw PreconditionError("haar_orthogonal: n must be >= 1");
  const Matrix g = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Fix column signs by diag(R) so the law is exactly Haar.
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix sample_double(const Matrix& z, Rng& rng) {
  const ClonePair pair = gauss_clone(z, rng);
  const Matrix u = haar_orthogonal(static_cast<int>(z.rows()), rng);
  Matrix out(2 * z.rows(), z.cols());
  out.topRows(z.rows()) = pair.first;
  out.bottomRows(z.rows()) = u * pair.second;
  return out;
}

}  // namespace covwig
