#pragma once

/// @file
/// Autocovariances gamma(k) = (2 pi)^{-1} int e^{-ik t} w(e^{it}) dt of an
/// ARFIMA symbol, via gamma = gamma_d (*) r with gamma_d the pure fractional
/// autocovariance and r the Fourier coefficients of g g^*.

#include "tlm/fourier.hpp"
#include "tlm/rational_symbol.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <memory>
#include <mutex>

namespace tlm {

/// Largest lag served by AutocovSeq.
inline constexpr long kMaxAutocovLag = 1L << 20;

/// gamma_d(k) = Gamma(1-2d) Gamma(k+d) / (Gamma(d) Gamma(1-d) Gamma(k+1-d)),
/// even in k. The ratio Gamma(k+d)/Gamma(k+1-d) is evaluated directly rather
/// than as a difference of log-Gammas, which loses digits for large k.
inline double gamma_fractional_closed_form(double d, long k) {
  if (!(d > 0.0 && d < 0.5)) throw DomainError("gamma_fractional_closed_form: d must lie in (0, 1/2)");
  const double kk = static_cast<double>(k < 0 ? -k : k);
  const double c = std::exp(std::lgamma(1.0 - 2.0 * d) - std::lgamma(d) - std::lgamma(1.0 - d));
  return c * boost::math::tgamma_delta_ratio(kk + d, 1.0 - 2.0 * d);
}

/// gamma_d(0..count-1) by the ratio recursion gamma_d(k+1) = gamma_d(k) (k+d)/(k+1-d).
/// For d = 0 this is the unit impulse.
inline std::vector<double> fractional_autocov_table(double d, long count) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0L)), 0.0);
  if (count <= 0) return out;
  if (d == 0.0) {
    out[0] = 1.0;
    return out;
  }
  out[0] = gamma_fractional_closed_form(d, 0);
  for (long k = 0; k + 1 < count; ++k)
    out[k + 1] = out[k] * (static_cast<double>(k) + d) / (static_cast<double>(k) + 1.0 - d);
  return out;
}

struct AutocovOptions {
  long fft_size = 1L << 14;
  long fft_cap = 1L << 20;
  double drop_tol = 1e-12;  // ||r_m|| below this (relative to ||r_0||) is dropped
};

/// Lazily extended, thread-safe table of gamma(k), k >= 0.
class AutocovSeq {
 public:
  explicit AutocovSeq(ArfimaSymbol sym, AutocovOptions opt = {}) : sym_(std::move(sym)), opt_(opt) {
    const ArfimaSymbol& s = sym_;
    const auto G = [&s](double theta) { return s.smooth_part(theta); };
    const double r0 = spectral_norm(fourier_coefficients(G, s.q(), 64).at(0));
    r_ = converged_fourier_coefficients(G, s.q(), opt_.fft_size, opt_.fft_cap, 1e-14 * std::max(1.0, r0),
                                        opt_.drop_tol * std::max(1.0, r0), &fft_used_);
    state_ = std::make_shared<const State>();
  }

  const ArfimaSymbol& symbol() const noexcept { return sym_; }
  int q() const noexcept { return sym_.q(); }
  long fft_size() const noexcept { return fft_used_; }
  /// Half-width of the retained r_m table.
  long smooth_half_width() const noexcept { return r_.half; }
  const FourierTable& smooth_coefficients() const noexcept { return r_; }

  /// gamma(k) for any |k| <= kMaxAutocovLag; gamma(-k) = gamma(k)^*.
  Mat gamma(long k) const {
    const long a = k < 0 ? -k : k;
    if (a > kMaxAutocovLag) throw InvalidInput("autocovariance lag beyond supported maximum");
    const auto st = ensure(a + 1);
    const Mat& g = st->gamma[static_cast<std::size_t>(a)];
    return k < 0 ? Mat(g.adjoint()) : g;
  }

  /// gamma(0..count-1).
  std::vector<Mat> gammas(long count) const {
    const auto st = ensure(count);
    return std::vector<Mat>(st->gamma.begin(), st->gamma.begin() + count);
  }

  long max_lag_computed() const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<long>(state_->gamma.size()) - 1;
  }

 private:
  struct State {
    std::vector<Mat> gamma;
  };

  std::shared_ptr<const State> ensure(long count) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (static_cast<long>(state_->gamma.size()) >= count) return state_;
    long target = std::max<long>(count, 2 * static_cast<long>(state_->gamma.size()));
    target = std::min(std::max(target, 64L), kMaxAutocovLag + 1);
    auto next = std::make_shared<State>(*state_);
    const long first = static_cast<long>(next->gamma.size());
    const long M = r_.half;
    const auto gd = fractional_autocov_table(sym_.d(), target + M + 1);
    next->gamma.resize(static_cast<std::size_t>(target));
    for (long k = first; k < target; ++k) {
      Mat acc = Mat::Zero(q(), q());
      for (long m = -M; m <= M; ++m) {
        const long lag = k - m < 0 ? m - k : k - m;
        const double w = gd[static_cast<std::size_t>(lag)];
        if (w != 0.0) acc += w * r_.at(m);
      }
      next->gamma[static_cast<std::size_t>(k)] = std::move(acc);
    }
    // gamma(0) is Hermitian; remove round-off asymmetry.
    if (first == 0) next->gamma[0] = (0.5 * (next->gamma[0] + next->gamma[0].adjoint())).eval();
    state_ = next;
    return state_;
  }

  ArfimaSymbol sym_;
  AutocovOptions opt_;
  FourierTable r_;
  long fft_used_ = 0;
  mutable std::mutex mu_;
  mutable std::shared_ptr<const State> state_;
};

}  // namespace tlm
