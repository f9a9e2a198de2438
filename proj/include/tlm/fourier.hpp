#pragma once

/// @file
/// Fourier coefficients of smooth matrix functions on the unit circle.

#include "tlm/core.hpp"

#include <unsupported/Eigen/FFT>

#include <functional>

namespace tlm {

/// Two-sided coefficient table c_m, m in [-half, half].
struct FourierTable {
  int q = 0;
  long half = 0;
  std::vector<Mat> coef;  // index m + half

  const Mat& at(long m) const { return coef.at(static_cast<std::size_t>(m + half)); }
  bool covers(long m) const { return m >= -half && m <= half; }
};

/// c_m = (1/N) sum_j f(t_j) e^{-i m t_j}, t_j = 2 pi j / N, for |m| < N/2.
/// Trapezoidal rule; spectrally accurate for analytic f.
inline FourierTable fourier_coefficients(const std::function<Mat(double)>& f, int q, long N) {
  std::vector<std::vector<cd>> samples(static_cast<std::size_t>(q) * q, std::vector<cd>(N));
  for (long j = 0; j < N; ++j) {
    const Mat v = f(2.0 * pi * static_cast<double>(j) / static_cast<double>(N));
    for (int r = 0; r < q; ++r)
      for (int c = 0; c < q; ++c) samples[static_cast<std::size_t>(r) * q + c][j] = v(r, c);
  }
  FourierTable out;
  out.q = q;
  out.half = N / 2 - 1;
  out.coef.assign(static_cast<std::size_t>(2 * out.half + 1), Mat::Zero(q, q));
  Eigen::FFT<double> fft;
  std::vector<cd> spec;
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) {
      fft.fwd(spec, samples[static_cast<std::size_t>(r) * q + c]);
      for (long m = -out.half; m <= out.half; ++m) {
        const long idx = m >= 0 ? m : N + m;
        out.coef[static_cast<std::size_t>(m + out.half)](r, c) = spec[idx] / static_cast<double>(N);
      }
    }
  return out;
}

/// Doubles N from n_start until max_m ||c_m(N) - c_m(N/2)|| < tol (or n_cap),
/// then trims the table to the smallest half-width whose tail blocks are all
/// below drop_tol in spectral norm. Returns the final grid in *n_used.
inline FourierTable converged_fourier_coefficients(const std::function<Mat(double)>& f, int q, long n_start,
                                                   long n_cap, double tol, double drop_tol, long* n_used = nullptr) {
  long N = n_start;
  FourierTable prev = fourier_coefficients(f, q, N);
  for (;;) {
    if (N >= n_cap) break;
    const long N2 = 2 * N;
    FourierTable next = fourier_coefficients(f, q, N2);
    double change = 0.0;
    for (long m = -prev.half; m <= prev.half; ++m) change = std::max(change, spectral_norm(next.at(m) - prev.at(m)));
    prev = std::move(next);
    N = N2;
    if (change < tol) break;
  }
  long keep = prev.half;
  while (keep > 0 && spectral_norm(prev.at(keep)) < drop_tol && spectral_norm(prev.at(-keep)) < drop_tol) --keep;
  FourierTable out;
  out.q = q;
  out.half = keep;
  out.coef.assign(prev.coef.begin() + (prev.half - keep), prev.coef.begin() + (prev.half + keep + 1));
  if (n_used) *n_used = N;
  return out;
}

}  // namespace tlm
