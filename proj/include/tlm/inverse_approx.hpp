#pragma once

/// @file
/// Closed-form blocks of T_inf(w)^{-1}, its n x n truncation, the
/// corner-corrected approximation Omega_{n,delta}(w), its ridge variant, and
/// the blockwise error sums Delta, C, R.

#include "tlm/block_linalg.hpp"
#include "tlm/coefficients.hpp"

#include <Eigen/Eigenvalues>

namespace tlm {

/// (T_inf(w)^{-1})^{s,t} = sum_{l=1}^{min(s,t)} a~*_{s-l} a~_{t-l}; with
/// reversed = true the same for w~, which uses a in place of a~.
inline Mat t_infty_inverse_block(const ArCoeffs& coeffs, long s, long t, bool reversed = false) {
  if (s < 1 || t < 1) throw InvalidInput("t_infty_inverse_block: indices start at 1");
  const auto v = coeffs.view(std::max(s, t));
  const CoeffSeq& x = reversed ? v.a() : v.a_tilde();
  Mat acc = Mat::Zero(coeffs.q(), coeffs.q());
  for (long l = 1; l <= std::min(s, t); ++l) acc.noalias() += x[s - l].adjoint() * x[t - l];
  return acc;
}

/// [T_inf^{-1}]_n from a coefficient sequence x (x = a~ for w), by the
/// diagonal recursion M^{s,t} = M^{s-1,t-1} + x*_{s-1} x_{t-1}. Upper
/// triangle computed, lower mirrored, so the result is exactly Hermitian.
inline BlockMatrix truncated_inverse_from(const CoeffSeq& x, long n) {
  const int q = x.q();
  BlockMatrix M(n, q);
  for (long s = 1; s <= n; ++s)
    for (long t = s; t <= n; ++t) {
      if (s == 1)
        M.block(s, t).noalias() = x[0].adjoint() * x[t - 1];
      else {
        M.block(s, t) = M.block(s - 1, t - 1);
        M.block(s, t).noalias() += x[s - 1].adjoint() * x[t - 1];
      }
    }
  for (long s = 1; s <= n; ++s)
    for (long t = 1; t < s; ++t) M.block(s, t) = M.block(t, s).adjoint();
  return M;
}

enum class ApproxKind { TruncatedInfinite, Omega, OmegaRidge };

struct InverseApprox {
  ApproxKind kind = ApproxKind::TruncatedInfinite;
  long n = 0;
  int q = 0;
  double delta = 0.0;
  double lambda = 0.0;
  BlockMatrix matrix;
};

inline InverseApprox truncated_infinite_inverse(const ArCoeffs& coeffs, long n, bool reversed = false) {
  if (n < 1) throw InvalidInput("truncated_infinite_inverse: n must be >= 1");
  const auto v = coeffs.view(n);
  InverseApprox out;
  out.kind = ApproxKind::TruncatedInfinite;
  out.n = n;
  out.q = coeffs.q();
  out.matrix = truncated_inverse_from(reversed ? v.a() : v.a_tilde(), n);
  return out;
}

/// H_delta(n) = {1..[delta n]}.
inline long corner_size(double delta, long n) { return floor_fraction(delta, n); }

/// Omega_{n,delta}(w): head corner from T_inf(w)^{-1}, tail corner from the
/// block-reversed T_inf(w~)^{-1}, the rest the average of the two.
inline InverseApprox omega(const ArCoeffs& coeffs, long n, double delta = 0.5) {
  if (!(delta > 0.0 && delta <= 0.5)) throw DomainError("omega: delta must lie in (0, 1/2]");
  if (n < 2) throw InvalidInput("omega: n must be >= 2");
  const auto v = coeffs.view(n);
  const BlockMatrix F = truncated_inverse_from(v.a_tilde(), n);
  const BlockMatrix R = block_reverse(truncated_inverse_from(v.a(), n));
  const long h = corner_size(delta, n);
  const auto in_head = [h](long s) { return s <= h; };
  const auto in_tail = [h, n](long s) { return s >= n - h + 1; };
  BlockMatrix W(n, coeffs.q());
  for (long s = 1; s <= n; ++s)
    for (long t = 1; t <= n; ++t) {
      if (in_head(s) && in_head(t))
        W.block(s, t) = F.block(s, t);
      else if (in_tail(s) && in_tail(t))
        W.block(s, t) = R.block(s, t);
      else
        W.block(s, t) = 0.5 * (F.block(s, t) + R.block(s, t));
    }
  InverseApprox out;
  out.kind = ApproxKind::Omega;
  out.n = n;
  out.q = coeffs.q();
  out.delta = delta;
  out.matrix = std::move(W);
  return out;
}

/// Smallest eigenvalue of a Hermitian block matrix.
inline double min_eigenvalue(const BlockMatrix& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Omega + lambda I.
inline InverseApprox omega_ridge(const InverseApprox& base, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("omega_ridge: lambda must be >= 0");
  InverseApprox out = base;
  out.kind = ApproxKind::OmegaRidge;
  out.lambda = lambda;
  out.matrix.dense().diagonal().array() += lambda;
  return out;
}

/// Ridge with lambda = max(0, -lambda_min(Omega)) + margin.
inline InverseApprox omega_ridge_auto(const InverseApprox& base, double margin = 1e-10) {
  return omega_ridge(base, std::max(0.0, -min_eigenvalue(base.matrix)) + margin);
}

/// Delta^{s,t} = ||exact^{s,t} - approx^{s,t}||, column sums C_t, row sums R_s.
struct ErrorSums {
  RealMat delta;  // 0-based (s-1, t-1)
  RealVec C;      // C[t-1]
  RealVec R;      // R[s-1]

  long n() const { return delta.rows(); }
  /// sum_{s=1}^{m} Delta^{s,t}.
  double partial_column_sum(long t, long m) const { return delta.col(t - 1).head(m).sum(); }
  double sup_C() const { return C.size() ? C.maxCoeff() : 0.0; }
};

inline ErrorSums error_sums(const BlockMatrix& exact, const BlockMatrix& approx) {
  if (exact.n() != approx.n() || exact.q() != approx.q()) throw InvalidInput("error_sums: shape mismatch");
  ErrorSums e;
  const long n = exact.n();
  e.delta.resize(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const long t = static_cast<long>(i) + 1;
    for (long s = 1; s <= n; ++s) e.delta(s - 1, t - 1) = spectral_norm(exact.block(s, t) - approx.block(s, t));
  });
  e.C = e.delta.colwise().sum().transpose();
  e.R = e.delta.rowwise().sum();
  return e;
}

/// Block l_p distance between two block matrices.
inline double block_distance(const BlockMatrix& A, const BlockMatrix& B, BlockNorm p) {
  const ErrorSums e = error_sums(A, B);
  return p == BlockNorm::One ? e.C.maxCoeff() : e.R.maxCoeff();
}

}  // namespace tlm
