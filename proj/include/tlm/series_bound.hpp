#pragma once

/// @file
/// The b~ recursion driven by the phase coefficients beta, the series
/// representation of T_n(w)^{-1} - T_inf(w)^{-1} built on it, and the
/// S_{1,k} / S_{2,k} sums of the corresponding upper bound.

#include "tlm/inverse_approx.hpp"

#include <memory>

namespace tlm {

struct BTildeOptions {
  long ell_max = 0;  // 0: 8n
  long m_cut = 0;    // 0: ell_max
  long k_max = 24;   // number of (odd, even) level pairs
  double tail_tol = 1e-8;
  bool companion = true;  // also build the half-resolution table used for error estimates
};

/// Tail of sum_{j > last} f_j when f_j ~ C j^{-p}, with p read off from
/// f at j_half and j_last. Returns +inf if the samples do not decay.
inline double power_tail(double f_half, double f_last, double j_half, double j_last) {
  if (f_last <= 0.0) return 0.0;
  if (f_half <= f_last) return std::numeric_limits<double>::infinity();
  const double p = std::log(f_half / f_last) / std::log(j_last / j_half);
  if (p <= 1.0) return std::numeric_limits<double>::infinity();
  return f_last * (j_last + 0.5) / (p - 1.0);
}

/// Levels b~^1 .. b~^{2 k_max} for fixed n. Level k is an (n q) x (L q)
/// matrix whose (u, l) block is b~^k_{n,u,l}, u = 1..n, l = 0..L-1.
class BTildeTable {
 public:
  long n() const noexcept { return n_; }
  int q() const noexcept { return q_; }
  double d() const noexcept { return d_; }
  long ell_max() const noexcept { return L_; }
  long m_cut() const noexcept { return m_cut_; }
  long k_max() const noexcept { return k_max_; }
  long levels() const noexcept { return static_cast<long>(levels_.size()); }
  double tail_tol() const noexcept { return tail_tol_; }

  /// Level k in 1..2 k_max.
  const Mat& level(long k) const { return levels_.at(static_cast<std::size_t>(k - 1)); }
  auto block(long k, long u, long l) const { return level(k).block((u - 1) * q_, l * q_, q_, q_); }

  /// Largest block norm per level.
  const std::vector<double>& level_max_norms() const noexcept { return level_max_; }
  /// Observed max over the used range of (j+1) ||beta_j||.
  double beta_envelope() const noexcept { return beta_env_; }
  /// Envelope bound on the first-level m-truncation, K^2 / (m_cut + 1).
  double m_tail_envelope() const noexcept { return beta_env_ * beta_env_ / static_cast<double>(m_cut_ + 1); }
  /// Geometric estimate of the level tail beyond the last level.
  double k_tail_estimate() const {
    const auto K = level_max_.size();
    if (K < 2 || level_max_[K - 1] == 0.0) return 0.0;
    const double r = level_max_[K - 1] / level_max_[K - 2];
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return level_max_[K - 1] * r / (1.0 - r);
  }

  const BTildeTable* companion() const noexcept { return companion_.get(); }

  /// Builds the table from beta_0, beta_1, ... (beta[j] = beta_j).
  static BTildeTable build(const CoeffSeq& beta, double d, long n, BTildeOptions opt) {
    if (n < 1) throw InvalidInput("build_btilde: n must be >= 1");
    if (opt.ell_max <= 0) opt.ell_max = 8 * n;
    if (opt.m_cut <= 0) opt.m_cut = opt.ell_max;
    if (opt.m_cut > opt.ell_max) throw InvalidInput("build_btilde: m_cut must not exceed ell_max");
    if (opt.k_max < 1) throw InvalidInput("build_btilde: k_max must be >= 1");
    const long need = n + 1 + opt.m_cut + opt.ell_max;
    if (beta.size() < need)
      throw InvalidInput("build_btilde: beta cache must cover index " + std::to_string(need - 1));

    BTildeTable t;
    t.n_ = n;
    t.q_ = beta.q();
    t.d_ = d;
    t.L_ = opt.ell_max;
    t.m_cut_ = opt.m_cut;
    t.k_max_ = opt.k_max;
    t.tail_tol_ = opt.tail_tol;
    const int q = t.q_;
    const long L = t.L_, M = t.m_cut_;
    for (long j = 1; j < need; ++j) t.beta_env_ = std::max(t.beta_env_, (j + 1.0) * spectral_norm(beta[j]));

    Mat B(n * q, L * q);
    for (long u = 1; u <= n; ++u)
      for (long l = 0; l < L; ++l) B.block((u - 1) * q, l * q, q, q) = beta[n + 1 - u + l].adjoint();
    Mat H(M * q, L * q), Hs(M * q, L * q);
    for (long m = 0; m < M; ++m)
      for (long l = 0; l < L; ++l) {
        H.block(m * q, l * q, q, q) = beta[n + 1 + m + l];
        Hs.block(m * q, l * q, q, q) = beta[n + 1 + m + l].adjoint();
      }

    t.levels_.reserve(static_cast<std::size_t>(2 * opt.k_max));
    t.levels_.push_back(std::move(B));
    for (long k = 2; k <= 2 * opt.k_max; ++k) {
      const Mat& prev = t.levels_.back();
      Mat next(n * q, L * q);
      next.noalias() = prev.leftCols(M * q) * (k % 2 == 0 ? H : Hs);
      t.levels_.push_back(std::move(next));
    }
    for (const auto& lv : t.levels_) {
      double mx = 0.0;
      for (long u = 0; u < n; ++u)
        for (long l = 0; l < L; ++l) mx = std::max(mx, spectral_norm(lv.block(u * q, l * q, q, q)));
      t.level_max_.push_back(mx);
    }
    if (opt.companion && L >= 2) {
      BTildeOptions half = opt;
      half.ell_max = L / 2;
      half.m_cut = std::max(1L, M / 2);
      half.companion = false;
      t.companion_ = std::make_shared<BTildeTable>(build(beta, d, n, half));
    }
    return t;
  }

 private:
  long n_ = 0;
  int q_ = 0;
  double d_ = 0.0;
  long L_ = 0, m_cut_ = 0, k_max_ = 0;
  double tail_tol_ = 0.0;
  double beta_env_ = 0.0;
  std::vector<Mat> levels_;
  std::vector<double> level_max_;
  std::shared_ptr<const BTildeTable> companion_;
};

/// Builds the b~ table for size n, pulling the needed beta_j from phase.
inline BTildeTable build_btilde(const PhaseCoeffs& phase, long n, BTildeOptions opt = {}) {
  const long L = opt.ell_max > 0 ? opt.ell_max : 8 * n;
  const long M = opt.m_cut > 0 ? opt.m_cut : L;
  return BTildeTable::build(phase.table(0, n + 1 + M + L), phase.d(), n, opt);
}

/// Estimated order of the l/m truncation error: |D_L - D_{L/2}| / (2^p - 1).
/// The error decays roughly like L^{-(1-2d)}; p = 0.8 (1 - 2d) is a slower,
/// conservative exponent.
inline double truncation_rate_exponent(double d) { return d > 0.0 ? 0.8 * (1.0 - 2.0 * d) : 1.0; }

/// The double series for T_n^{-1} - T_inf^{-1}, all (s,t) at once.
struct KeyEqualityResult {
  BlockMatrix diff;      // series value
  RealMat bound;         // per-block truncation estimate (0-based s-1, t-1)
  double k_tail = 0.0;   // estimated contribution of levels beyond the table
  std::vector<double> level_pair_max;  // max block norm of the k-th (odd + even) term

  double max_bound() const { return bound.size() ? bound.maxCoeff() : 0.0; }
};

namespace detail {

inline BlockMatrix key_equality_sum(const ArCoeffs& coeffs, const BTildeTable& tab,
                                    std::vector<double>* pair_max = nullptr) {
  const long n = tab.n(), L = tab.ell_max();
  const int q = tab.q();
  const auto v = coeffs.view(n + L + 2);
  const CoeffSeq& a = v.a();
  const CoeffSeq& at = v.a_tilde();
  Mat A1(n * q, L * q), A2(n * q, L * q);
  for (long s = 1; s <= n; ++s)
    for (long l = 0; l < L; ++l) {
      A1.block((s - 1) * q, l * q, q, q) = a[n + 1 - s + l].adjoint();
      A2.block((s - 1) * q, l * q, q, q) = at[s + l].adjoint();
    }
  Mat C = Mat::Zero(n * q, n * q);
  for (long u = 1; u <= n; ++u)
    for (long t = u; t <= n; ++t) C.block((u - 1) * q, (t - 1) * q, q, q) = at[t - u];

  Mat odd = Mat::Zero(n * q, L * q), even = Mat::Zero(n * q, L * q);
  for (long k = 1; k <= tab.k_max(); ++k) {
    odd += tab.level(2 * k - 1);
    even += tab.level(2 * k);
    if (pair_max) {
      const Mat term = (A1 * tab.level(2 * k - 1).adjoint() + A2 * tab.level(2 * k).adjoint()) * C;
      double mx = 0.0;
      for (long s = 0; s < n; ++s)
        for (long t = 0; t < n; ++t) mx = std::max(mx, spectral_norm(term.block(s * q, t * q, q, q)));
      pair_max->push_back(mx);
    }
  }
  Mat D = (A1 * odd.adjoint() + A2 * even.adjoint()) * C;
  return BlockMatrix(n, q, std::move(D));
}

}  // namespace detail

inline KeyEqualityResult key_equality_matrix(const ArCoeffs& coeffs, const BTildeTable& tab) {
  KeyEqualityResult r;
  r.diff = detail::key_equality_sum(coeffs, tab, &r.level_pair_max);
  const long n = tab.n();
  const auto& pm = r.level_pair_max;
  if (pm.size() >= 2 && pm.back() > 0.0) {
    const double ratio = pm.back() / pm[pm.size() - 2];
    r.k_tail = ratio < 1.0 ? pm.back() * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  }
  r.bound = RealMat::Constant(n, n, r.k_tail);
  if (const BTildeTable* half = tab.companion()) {
    const BlockMatrix Dh = detail::key_equality_sum(coeffs, *half);
    const double denom = std::pow(2.0, truncation_rate_exponent(tab.d())) - 1.0;
    for (long s = 1; s <= n; ++s)
      for (long t = 1; t <= n; ++t) r.bound(s - 1, t - 1) += spectral_norm(r.diff.block(s, t) - Dh.block(s, t)) / denom;
  } else {
    r.bound.setConstant(std::numeric_limits<double>::infinity());
  }
  return r;
}

/// Single block of the series, summed term by term, with its truncation
/// estimate from the companion table.
inline std::pair<Mat, double> key_equality_diff(const ArCoeffs& coeffs, const BTildeTable& tab, long s, long t) {
  const long n = tab.n();
  if (s < 1 || s > n || t < 1 || t > n) throw InvalidInput("key_equality_diff: index out of range");
  const auto eval = [&](const BTildeTable& tb) {
    const long L = tb.ell_max();
    const int q = tb.q();
    const auto v = coeffs.view(n + L + 2);
    const CoeffSeq& a = v.a();
    const CoeffSeq& at = v.a_tilde();
    Mat acc = Mat::Zero(q, q);
    for (long k = 1; k <= tb.k_max(); ++k)
      for (long u = 1; u <= t; ++u) {
        Mat inner = Mat::Zero(q, q);
        for (long l = 0; l < L; ++l) {
          inner.noalias() += a[n + 1 - s + l].adjoint() * tb.block(2 * k - 1, u, l).adjoint();
          inner.noalias() += at[s + l].adjoint() * tb.block(2 * k, u, l).adjoint();
        }
        acc.noalias() += inner * at[t - u];
      }
    return acc;
  };
  const Mat value = eval(tab);
  double bound = std::numeric_limits<double>::infinity();
  if (const BTildeTable* half = tab.companion()) {
    const double denom = std::pow(2.0, truncation_rate_exponent(tab.d())) - 1.0;
    bound = spectral_norm(value - eval(*half)) / denom + tab.k_tail_estimate();
  }
  return {value, bound};
}

struct SSums {
  double S1 = 0.0;
  double S2 = 0.0;
  double S1_tail = 0.0;  // estimated l-tail beyond the table
  double S2_tail = 0.0;
};

/// S_{1,k}(n,s,t) and S_{2,k}(n,s,t), s,t in 0..n-1, summed over the table's l range.
inline SSums s_sums(const BTildeTable& tab, long k, long s, long t) {
  const long n = tab.n(), L = tab.ell_max();
  if (k < 1 || k > tab.levels()) throw InvalidInput("s_sums: level outside table");
  if (s < 0 || s > n - 1 || t < 0 || t > n - 1) throw InvalidInput("s_sums: s, t must lie in 0..n-1");
  const double d = tab.d();
  std::vector<double> f1(static_cast<std::size_t>(L)), f2(static_cast<std::size_t>(L), 0.0);
  for (long l = 0; l < L; ++l) {
    const double w = std::pow(s + l + 2.0, -1.0 - d);
    f1[l] = w * spectral_norm(tab.block(k, 1, l)) * std::pow(t + 1.0, -d);
    for (long u = 0; u <= t - 1; ++u)
      f2[l] += w * std::pow(u + 1.0, -d) * spectral_norm(tab.block(k, t - u, l) - tab.block(k, t + 1 - u, l));
  }
  SSums r;
  for (long l = 0; l < L; ++l) {
    r.S1 += f1[l];
    r.S2 += f2[l];
  }
  if (L >= 4) {
    r.S1_tail = power_tail(f1[L / 2], f1[L - 1], L / 2.0, L - 1.0);
    r.S2_tail = power_tail(f2[L / 2], f2[L - 1], L / 2.0, L - 1.0);
  }
  return r;
}

/// Empirical constants: K1 = max_k (k+1)^{1+d} max(||a_k||, ||a~_k||),
/// K2 = max_{k>=1} k^d ||A~_k||, over k < count.
struct DecayConstants {
  double K1 = 0.0;
  double K2 = 0.0;
};

inline DecayConstants empirical_constants(const ArCoeffs& coeffs, long count) {
  const auto v = coeffs.view(count);
  const double d = coeffs.d();
  DecayConstants c;
  for (long k = 0; k < count; ++k) {
    const double m = std::max(spectral_norm(v.a()[k]), spectral_norm(v.a_tilde()[k]));
    c.K1 = std::max(c.K1, std::pow(k + 1.0, 1.0 + d) * m);
    if (k >= 1) c.K2 = std::max(c.K2, std::pow(static_cast<double>(k), d) * spectral_norm(v.A_tilde()[k]));
  }
  return c;
}

/// Right side of the Delta_n^{s,t} upper bound,
///   K1 K2 sum_k [S_{1,2k-1} + S_{2,2k-1}](n, n-s, t-1) + [S_{1,2k} + S_{2,2k}](n, s-1, t-1),
/// for all s,t in 1..n (0-based result). Sums run over the table's k and l ranges.
inline RealMat tnbound_matrix(const BTildeTable& tab, DecayConstants c) {
  const long n = tab.n(), L = tab.ell_max();
  const double d = tab.d();
  // W(sigma, l) = (sigma + l + 2)^{-1-d}, sigma = 0..n-1.
  RealMat W(n, L);
  for (long sg = 0; sg < n; ++sg)
    for (long l = 0; l < L; ++l) W(sg, l) = std::pow(sg + l + 2.0, -1.0 - d);
  RealVec tw(n);  // (t'+1)^{-d}
  for (long tp = 0; tp < n; ++tp) tw(tp) = std::pow(tp + 1.0, -d);

  RealMat odd = RealMat::Zero(n, n), even = RealMat::Zero(n, n);  // indexed (sigma, t')
  for (long k = 1; k <= tab.levels(); ++k) {
    RealVec N1(L);
    RealMat Dn(n, L);  // Dn(v-1, l) = ||b~_{v,l} - b~_{v+1,l}||, v = 1..n-1
    for (long l = 0; l < L; ++l) {
      N1(l) = spectral_norm(tab.block(k, 1, l));
      for (long v = 1; v < n; ++v) Dn(v - 1, l) = spectral_norm(tab.block(k, v, l) - tab.block(k, v + 1, l));
    }
    // Q(t', l) = sum_{u=0}^{t'-1} (u+1)^{-d} Dn(t'-u-1, l).
    RealMat Q = RealMat::Zero(n, L);
    for (long tp = 1; tp < n; ++tp)
      for (long u = 0; u <= tp - 1; ++u) Q.row(tp) += tw(u) * Dn.row(tp - u - 1);
    RealMat S = W * (Q.transpose());                      // S2(sigma, t')
    S += (W * N1) * tw.transpose();                       // + S1(sigma, t')
    (k % 2 == 1 ? odd : even) += S;
  }
  RealMat out(n, n);
  for (long s = 1; s <= n; ++s)
    for (long t = 1; t <= n; ++t) out(s - 1, t - 1) = c.K1 * c.K2 * (odd(n - s, t - 1) + even(s - 1, t - 1));
  return out;
}

inline double tnbound_rhs(const BTildeTable& tab, DecayConstants c, long s, long t) {
  const long n = tab.n();
  if (s < 1 || s > n || t < 1 || t > n) throw InvalidInput("tnbound_rhs: index out of range");
  double acc = 0.0;
  for (long k = 1; k <= tab.levels(); ++k) {
    const SSums ss = (k % 2 == 1) ? s_sums(tab, k, n - s, t - 1) : s_sums(tab, k, s - 1, t - 1);
    acc += ss.S1 + ss.S2;
  }
  return c.K1 * c.K2 * acc;
}

}  // namespace tlm
