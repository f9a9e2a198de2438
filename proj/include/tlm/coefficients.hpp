#pragma once

/// @file
/// AR coefficients a_k, a~_k of -h^{-1}, -h~^{-1}, their tails A~_k, the
/// phase-function coefficients beta_k, finite predictor coefficients, and
/// decay fits of coefficient sequences.

#include "tlm/autocovariance.hpp"
#include "tlm/rate_fit.hpp"

#include <memory>
#include <mutex>

namespace tlm {

/// Contiguous sequence of q x q blocks x_0, x_1, ... stored side by side.
class CoeffSeq {
 public:
  CoeffSeq() = default;
  CoeffSeq(int q, long count) : q_(q), data_(Mat::Zero(q, static_cast<Eigen::Index>(q) * count)) {}

  int q() const noexcept { return q_; }
  long size() const noexcept { return q_ == 0 ? 0 : static_cast<long>(data_.cols() / q_); }
  auto operator[](long k) const { return data_.middleCols(k * q_, q_); }
  auto operator[](long k) { return data_.middleCols(k * q_, q_); }
  Mat at(long k) const {
    if (k < 0 || k >= size()) throw InvalidInput("CoeffSeq: index out of cached range");
    return (*this)[k];
  }
  const Mat& storage() const noexcept { return data_; }

  std::vector<double> norms() const {
    std::vector<double> out(static_cast<std::size_t>(size()));
    for (long k = 0; k < size(); ++k) out[static_cast<std::size_t>(k)] = spectral_norm((*this)[k]);
    return out;
  }

 private:
  int q_ = 0;
  Mat data_;
};

/// Taylor coefficients 0..count-1 of (1 - z)^d.
inline std::vector<double> binomial_series(double d, long count) {
  std::vector<double> b(static_cast<std::size_t>(count), 0.0);
  if (count == 0) return b;
  b[0] = 1.0;
  for (long k = 1; k < count; ++k) b[k] = b[k - 1] * (static_cast<double>(k) - 1.0 - d) / static_cast<double>(k);
  return b;
}

/// Taylor coefficients of -(1 - z)^d g(z)^{-1}, computed entrywise from the
/// rational inverse: -(1-z)^d P/Q with ((1-z)^d P) formed by a short
/// convolution and the division by Q by recursion. O(count * degree).
inline CoeffSeq ar_series(double d, const RationalMatrixFn& g, long count) {
  const int q = g.q();
  const RationalMatrixFn inv = g.inverse();
  const auto b = binomial_series(d, count);
  CoeffSeq out(q, count);
  std::vector<cd> s(static_cast<std::size_t>(count));
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) {
      const auto& e = inv.entry(r, c);
      if (poly_is_zero(e.num)) continue;
      const Poly& P = e.num;
      const Poly& Q = e.den;
      const cd q0 = Q.at(0);
      for (long k = 0; k < count; ++k) {
        cd acc{0.0, 0.0};
        const long jmax = std::min<long>(k, static_cast<long>(P.size()) - 1);
        for (long j = 0; j <= jmax; ++j) acc += P[j] * b[static_cast<std::size_t>(k - j)];
        const long imax = std::min<long>(k, static_cast<long>(Q.size()) - 1);
        for (long i = 1; i <= imax; ++i) acc -= Q[i] * s[static_cast<std::size_t>(k - i)];
        s[static_cast<std::size_t>(k)] = acc / q0;
      }
      for (long k = 0; k < count; ++k) out[k](r, c) = -s[static_cast<std::size_t>(k)];
    }
  return out;
}

/// Tails T_k = c + sum_{u<k} x_u for k = 0..x.size().
inline CoeffSeq tail_sums(const CoeffSeq& x, const Mat& c) {
  CoeffSeq out(x.q(), x.size() + 1);
  out[0] = c;
  for (long k = 0; k < x.size(); ++k) out[k + 1] = out[k] + x[k];
  return out;
}

/// a_k (forward), a~_k (backward) and A~_k = -sum_{u>=k} a~_u, cached and
/// extended on demand. Copies share the cache; reversed() views the same data
/// as the coefficients of the time-reversed symbol.
class ArCoeffs {
 public:
  struct Tables {
    CoeffSeq fwd;       // a_k of w
    CoeffSeq bwd;       // a~_k of w (= a_k of w~)
    CoeffSeq fwd_tail;  // A_k built from a (the A~ of w~)
    CoeffSeq bwd_tail;  // A~_k of w
  };

  /// Read-only view at a fixed cache size, oriented for w or for w~.
  class View {
   public:
    View(std::shared_ptr<const Tables> t, bool swapped) : t_(std::move(t)), swapped_(swapped) {}
    const CoeffSeq& a() const { return swapped_ ? t_->bwd : t_->fwd; }
    const CoeffSeq& a_tilde() const { return swapped_ ? t_->fwd : t_->bwd; }
    const CoeffSeq& A_tilde() const { return swapped_ ? t_->fwd_tail : t_->bwd_tail; }
    long size() const { return t_->fwd.size(); }

   private:
    std::shared_ptr<const Tables> t_;
    bool swapped_;
  };

  ArCoeffs(const ArfimaSymbol& sym, long count) : shared_(std::make_shared<Shared>(sym)) {
    if (count < 1) throw InvalidInput("ar_coefficients: count must be >= 1");
    ensure(count);
  }

  const ArfimaSymbol& symbol() const { return swapped_ ? shared_->rev : shared_->sym; }
  double d() const { return shared_->sym.d(); }
  int q() const { return shared_->sym.q(); }
  bool is_reversed() const noexcept { return swapped_; }

  /// Coefficients of w~: a and a~ exchange roles.
  ArCoeffs reversed() const {
    ArCoeffs r = *this;
    r.swapped_ = !swapped_;
    return r;
  }

  /// Number of cached coefficients.
  long size() const {
    std::lock_guard<std::mutex> lock(shared_->mu);
    return shared_->tables->fwd.size();
  }

  /// View holding at least count coefficients.
  View view(long count) const { return View(ensure(count), swapped_); }

  Mat a(long k) const { return view(k + 1).a()[k]; }
  Mat a_tilde(long k) const { return view(k + 1).a_tilde()[k]; }
  Mat A_tilde(long k) const { return view(std::max(k, 1L)).A_tilde()[k]; }

 private:
  struct Shared {
    explicit Shared(const ArfimaSymbol& s) : sym(s), rev(time_reverse(s)) {}
    ArfimaSymbol sym;
    ArfimaSymbol rev;
    std::mutex mu;
    std::shared_ptr<const Tables> tables = std::make_shared<Tables>();
  };

  std::shared_ptr<const Tables> ensure(long count) const {
    std::lock_guard<std::mutex> lock(shared_->mu);
    const auto& cur = shared_->tables;
    if (cur->fwd.size() >= count) return cur;
    const long target = std::max(count, 2 * cur->fwd.size());
    auto t = std::make_shared<Tables>();
    const double d = shared_->sym.d();
    t->fwd = ar_series(d, shared_->sym.g(), target);
    t->bwd = ar_series(d, shared_->rev.g(), target);
    const int q = shared_->sym.q();
    // Exact total sums: sum_u a_u = -h(1)^{-1}, which is 0 for d > 0.
    const Mat c_fwd = d > 0.0 ? Mat::Zero(q, q) : Mat(shared_->sym.g().eval(1.0).inverse());
    const Mat c_bwd = d > 0.0 ? Mat::Zero(q, q) : Mat(shared_->rev.g().eval(1.0).inverse());
    t->fwd_tail = tail_sums(t->fwd, c_fwd);
    t->bwd_tail = tail_sums(t->bwd, c_bwd);
    shared_->tables = t;
    return t;
  }

  std::shared_ptr<Shared> shared_;
  bool swapped_ = false;
};

/// Builds the coefficient tables of a symbol with at least count entries.
inline ArCoeffs ar_coefficients(const ArfimaSymbol& sym, long count) { return ArCoeffs(sym, count); }

/// Fourier coefficients of the phase function h^* h_sharp^{-1}, negated:
/// beta_k = -(2 pi)^{-1} int e^{-ikt} h(e^{it})^* h_sharp(e^{it})^{-1} dt.
/// The phase factors as e^{id(t - pi)} (t in (0, 2 pi)) times the smooth
/// g^* g_sharp^{-1}; the first has exact coefficients sin(pi d)/(pi (d - k)),
/// the second is computed by FFT with grid doubling.
class PhaseCoeffs {
 public:
  struct Options {
    long fft_start = 1L << 12;
    long fft_cap = 1L << 20;
    double tol = 1e-12;
  };

  explicit PhaseCoeffs(const ArfimaSymbol& sym) : PhaseCoeffs(sym, Options{}) {}
  PhaseCoeffs(const ArfimaSymbol& sym, Options opt) : d_(sym.d()), q_(sym.q()) {
    const auto M = [&sym](double theta) { return sym.phase_smooth_part(theta); };
    smooth_ = converged_fourier_coefficients(M, q_, opt.fft_start, opt.fft_cap, opt.tol, 1e-16, &fft_size_);
  }

  double d() const noexcept { return d_; }
  int q() const noexcept { return q_; }
  /// d = 0: the phase has no fractional jump.
  bool degenerate() const noexcept { return d_ == 0.0; }
  long fft_size() const noexcept { return fft_size_; }

  /// Exact coefficient of e^{id(t - pi)}.
  static double fractional_phase_coefficient(double d, long k) {
    if (d == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::sin(pi * d) / (pi * (d - static_cast<double>(k)));
  }

  Mat beta(long k) const {
    Mat acc = Mat::Zero(q_, q_);
    for (long j = -smooth_.half; j <= smooth_.half; ++j) {
      const double f = fractional_phase_coefficient(d_, k - j);
      if (f != 0.0) acc -= f * smooth_.at(j);
    }
    return acc;
  }

  /// beta_{first}, ..., beta_{first + count - 1}.
  CoeffSeq table(long first, long count) const {
    CoeffSeq out(q_, count);
    for (long i = 0; i < count; ++i) out[i] = beta(first + i);
    return out;
  }

 private:
  double d_;
  int q_;
  FourierTable smooth_;
  long fft_size_ = 0;
};

inline PhaseCoeffs beta_coefficients(const ArfimaSymbol& sym) { return PhaseCoeffs(sym); }

/// Finite one-step predictor of X_{n+1} from X_n, ..., X_1:
/// X^_{n+1} = sum_k phi_{n,k} X_{n+1-k}, error covariance v_{n+1}.
struct Predictor {
  std::vector<Mat> phi;  // phi[k-1] = phi_{n,k}
  Mat v;
};

/// Block Durbin-Levinson (Whittle) recursion on gamma(0..n).
inline Predictor predictor_coefficients(const std::vector<Mat>& gamma, long n) {
  if (n < 1) throw InvalidInput("predictor_coefficients: n must be >= 1");
  if (static_cast<long>(gamma.size()) < n + 1) throw InvalidInput("predictor_coefficients: not enough lags");
  const auto G = [&gamma](long k) -> Mat { return k >= 0 ? gamma[k] : Mat(gamma[-k].adjoint()); };
  const auto chol_inv = [](const Mat& V, long step) {
    Eigen::LLT<Mat> llt(0.5 * (V + V.adjoint()));
    if (llt.info() != Eigen::Success) throw FactorizationError("predictor recursion: error covariance not PD", step);
    return Mat(llt.solve(Mat::Identity(V.rows(), V.cols())));
  };
  std::vector<Mat> phi, psi;  // forward / backward coefficients of the current order
  Mat V = G(0), U = G(0);
  for (long m = 1; m <= n; ++m) {
    Mat delta = G(m);
    for (long j = 1; j < m; ++j) delta -= phi[j - 1] * G(m - j);
    const Mat phi_mm = delta * chol_inv(U, m - 1);
    const Mat psi_mm = delta.adjoint() * chol_inv(V, m - 1);
    std::vector<Mat> nphi(m), npsi(m);
    for (long k = 1; k < m; ++k) {
      nphi[k - 1] = phi[k - 1] - phi_mm * psi[m - k - 1];
      npsi[k - 1] = psi[k - 1] - psi_mm * phi[m - k - 1];
    }
    nphi[m - 1] = phi_mm;
    npsi[m - 1] = psi_mm;
    phi = std::move(nphi);
    psi = std::move(npsi);
    Mat nV = G(0), nU = G(0);
    for (long j = 1; j <= m; ++j) {
      nV -= phi[j - 1] * G(-j);
      nU -= psi[j - 1] * G(j);
    }
    V = 0.5 * (nV + nV.adjoint());
    U = 0.5 * (nU + nU.adjoint());
  }
  return Predictor{std::move(phi), std::move(V)};
}

inline Predictor predictor_coefficients(const AutocovSeq& seq, long n) {
  return predictor_coefficients(seq.gammas(n + 1), n);
}

/// Log-log fit of ||x_k|| against k over [n_min, n_max].
inline RateFitReport decay_fit(const std::vector<double>& norms, long n_min, long n_max) {
  if (n_min < 1 || n_max < n_min) throw InvalidInput("decay_fit: bad range");
  if (n_max >= static_cast<long>(norms.size())) throw InvalidInput("decay_fit: range beyond cached sequence");
  std::vector<double> x, y;
  for (long k = n_min; k <= n_max; ++k) {
    x.push_back(static_cast<double>(k));
    y.push_back(norms[static_cast<std::size_t>(k)]);
  }
  return loglog_fit(x, y);
}

inline RateFitReport decay_fit(const CoeffSeq& seq, long n_min, long n_max) {
  if (n_max >= seq.size()) throw InvalidInput("decay_fit: range beyond cached sequence");
  std::vector<double> norms(static_cast<std::size_t>(n_max + 1), 0.0);
  for (long k = n_min; k <= n_max; ++k) norms[static_cast<std::size_t>(k)] = spectral_norm(seq[k]);
  return decay_fit(norms, n_min, n_max);
}

/// Differences x_{k+1} - x_k.
inline CoeffSeq differences(const CoeffSeq& x) {
  CoeffSeq out(x.q(), std::max(x.size() - 1, 0L));
  for (long k = 0; k + 1 < x.size(); ++k) out[k] = x[k + 1] - x[k];
  return out;
}

}  // namespace tlm
