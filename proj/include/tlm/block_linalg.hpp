#pragma once

/// @file
/// Dense block matrices with 1-based (s,t) block addressing, block Toeplitz
/// assembly, Cholesky-based inversion and solves, block l_p norms.

#include "tlm/autocovariance.hpp"

#include <Eigen/Cholesky>

#include <memory>
#include <mutex>

namespace tlm {

/// n x n grid of q x q blocks over a dense qn x qn matrix.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(long n, int q) : n_(n), q_(q), data_(Mat::Zero(n * q, n * q)) {}
  BlockMatrix(long n, int q, Mat data) : n_(n), q_(q), data_(std::move(data)) {
    if (data_.rows() != n * q || data_.cols() != n * q) throw InvalidInput("BlockMatrix: storage shape mismatch");
  }

  static BlockMatrix identity(long n, int q) { return BlockMatrix(n, q, Mat::Identity(n * q, n * q)); }

  long n() const noexcept { return n_; }
  int q() const noexcept { return q_; }
  const Mat& dense() const noexcept { return data_; }
  Mat& dense() noexcept { return data_; }

  /// Block A^{s,t}, s,t in 1..n.
  auto block(long s, long t) const { return data_.block((s - 1) * q_, (t - 1) * q_, q_, q_); }
  auto block(long s, long t) { return data_.block((s - 1) * q_, (t - 1) * q_, q_, q_); }

 private:
  long n_ = 0;
  int q_ = 0;
  Mat data_;
};

/// Blockwise spectral norms ||A^{s,t}||, as an n x n real matrix (0-based).
inline RealMat block_norms(const BlockMatrix& A) {
  RealMat out(A.n(), A.n());
  for (long t = 1; t <= A.n(); ++t)
    for (long s = 1; s <= A.n(); ++s) out(s - 1, t - 1) = spectral_norm(A.block(s, t));
  return out;
}

enum class BlockNorm { One, Inf };

/// p = 1: max_t sum_s ||A^{s,t}||; p = inf: max_s sum_t ||A^{s,t}||.
inline double block_lp_norm(const BlockMatrix& A, BlockNorm p) {
  const RealMat nm = block_norms(A);
  if (nm.size() == 0) return 0.0;
  return p == BlockNorm::One ? nm.colwise().sum().maxCoeff() : nm.rowwise().sum().maxCoeff();
}

/// max |A - A^*| entrywise.
inline double hermitian_defect(const Mat& A) { return (A - A.adjoint()).cwiseAbs().maxCoeff(); }

/// Block reversal: R^{s,t} = A^{n+1-s, n+1-t}.
inline BlockMatrix block_reverse(const BlockMatrix& A) {
  BlockMatrix R(A.n(), A.q());
  for (long s = 1; s <= A.n(); ++s)
    for (long t = 1; t <= A.n(); ++t) R.block(s, t) = A.block(A.n() + 1 - s, A.n() + 1 - t);
  return R;
}

/// Cholesky factorization that reports the failing scalar pivot.
inline Eigen::LLT<Mat> checked_cholesky(const Mat& A) {
  Eigen::LLT<Mat> llt(A);
  if (llt.info() == Eigen::Success) return llt;
  // Locate the pivot with a plain unblocked pass.
  const long N = A.rows();
  Mat L = A;
  for (long j = 0; j < N; ++j) {
    cd diag = L(j, j);
    for (long k = 0; k < j; ++k) diag -= L(j, k) * std::conj(L(j, k));
    if (!(diag.real() > 0.0) || !std::isfinite(diag.real())) throw FactorizationError("matrix is not positive definite", j);
    const double ljj = std::sqrt(diag.real());
    L(j, j) = ljj;
    for (long i = j + 1; i < N; ++i) {
      cd v = L(i, j);
      for (long k = 0; k < j; ++k) v -= L(i, k) * std::conj(L(j, k));
      L(i, j) = v / ljj;
    }
  }
  throw FactorizationError("Cholesky factorization failed", N - 1);
}

/// T^{s,t} = gamma(s - t). Stores gamma(-n+1..n-1); the factorization is
/// computed once on first use and shared by copies.
class BlockToeplitz {
 public:
  BlockToeplitz() = default;

  /// gamma_nonneg holds gamma(0..n-1); negative lags follow from gamma(-k) = gamma(k)^*.
  BlockToeplitz(long n, const std::vector<Mat>& gamma_nonneg) : n_(n) {
    if (n < 1) throw InvalidInput("BlockToeplitz: n must be >= 1");
    if (static_cast<long>(gamma_nonneg.size()) < n) throw InvalidInput("BlockToeplitz: not enough lags");
    q_ = static_cast<int>(gamma_nonneg[0].rows());
    row_.resize(static_cast<std::size_t>(2 * n - 1));
    for (long k = 0; k < n; ++k) {
      row_[static_cast<std::size_t>(n - 1 + k)] = gamma_nonneg[static_cast<std::size_t>(k)];
      row_[static_cast<std::size_t>(n - 1 - k)] = gamma_nonneg[static_cast<std::size_t>(k)].adjoint();
    }
    cache_ = std::make_shared<Cache>();
  }

  long n() const noexcept { return n_; }
  int q() const noexcept { return q_; }

  /// gamma(k) for |k| < n.
  const Mat& gamma(long k) const { return row_.at(static_cast<std::size_t>(n_ - 1 + k)); }

  BlockMatrix materialize() const {
    BlockMatrix T(n_, q_);
    for (long s = 1; s <= n_; ++s)
      for (long t = 1; t <= n_; ++t) T.block(s, t) = gamma(s - t);
    return T;
  }

  /// The Cholesky factor of the materialized matrix (thread-safe, computed once).
  const Eigen::LLT<Mat>& factor() const {
    std::call_once(cache_->once, [this] { cache_->llt = checked_cholesky(materialize().dense()); });
    return cache_->llt;
  }

 private:
  struct Cache {
    std::once_flag once;
    Eigen::LLT<Mat> llt;
  };

  long n_ = 0;
  int q_ = 0;
  std::vector<Mat> row_;
  std::shared_ptr<Cache> cache_;
};

/// T_n(w) from an autocovariance sequence.
inline BlockToeplitz build_Tn(const AutocovSeq& seq, long n) {
  if (n < 1) throw InvalidInput("build_Tn: n must be >= 1");
  return BlockToeplitz(n, seq.gammas(n));
}

/// T_n(w~) from the autocovariances of w: gamma~(k) = gamma(-k).
inline BlockToeplitz build_Tn_reversed(const AutocovSeq& seq, long n) {
  auto g = seq.gammas(n);
  for (auto& m : g) m = m.adjoint().eval();
  return BlockToeplitz(n, g);
}

/// Solves T z = y for a qn x m right-hand side.
inline Mat solve(const BlockToeplitz& T, const Mat& y) {
  if (y.rows() != T.n() * T.q()) throw InvalidInput("solve: right-hand side has wrong row count");
  return T.factor().solve(y);
}

/// Exact T^{-1} (Hermitian part of the computed inverse).
inline BlockMatrix cholesky_inverse(const BlockToeplitz& T) {
  const long N = T.n() * T.q();
  Mat inv = T.factor().solve(Mat::Identity(N, N));
  inv = (0.5 * (inv + inv.adjoint())).eval();
  return BlockMatrix(T.n(), T.q(), std::move(inv));
}

/// Same, for a Hermitian positive definite block matrix given densely.
inline BlockMatrix cholesky_inverse(const BlockMatrix& A) {
  const long N = A.n() * A.q();
  Mat inv = checked_cholesky(A.dense()).solve(Mat::Identity(N, N));
  inv = (0.5 * (inv + inv.adjoint())).eval();
  return BlockMatrix(A.n(), A.q(), std::move(inv));
}

}  // namespace tlm
