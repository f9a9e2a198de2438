#pragma once

/// @file
/// Semi-infinite block Wiener-Hopf systems T_inf(w) z = y, their finite
/// sections T_n(w) z_n = y_n, Baxter-type errors sum_k ||z_k - z_{k,n}|| and
/// the convergence of finite predictor coefficients.

#include "tlm/inverse_approx.hpp"
#include "tlm/series_bound.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <functional>
#include <limits>
#include <optional>

namespace tlm {

/// Right-hand side y_1, y_2, ... of a Wiener-Hopf system.
struct OutputSeq {
  enum class Tag { ARho, B, Custom };

  Tag tag = Tag::Custom;
  double rho = 0.0;  // A_rho exponent, or the power of the shipped B generator
  int q = 1;
  long support = 0;  // y_k = 0 for k > support; 0 means unbounded support
  double power = std::numeric_limits<double>::quiet_NaN();  // weight(k) = k^{-power} exactly when finite
  /// y_k = weight(k) I_q when set; otherwise gen(k).
  std::function<double(long)> weight;
  std::function<Mat(long)> gen;
  std::string label;

  Mat at(long k) const {
    if (k < 1 || (support > 0 && k > support)) return Mat::Zero(q, q);
    if (weight) return weight(k) * Mat::Identity(q, q);
    return gen(k);
  }
  bool scalar() const { return static_cast<bool>(weight); }

  /// y_k = k^{-rho} I_q.
  static OutputSeq a_rho(double rho, int q) {
    OutputSeq y;
    y.tag = Tag::ARho;
    y.rho = rho;
    y.q = q;
    y.power = rho;
    y.weight = [rho](long k) { return std::pow(static_cast<double>(k), -rho); };
    y.label = "A_rho(" + format_double(rho) + ")";
    return y;
  }

  /// y_k = k^{-power} I_q with power > 1 (absolutely summable).
  static OutputSeq b_power(int q, double power = 1.5) {
    if (!(power > 1.0)) throw DomainError("B-class generator needs power > 1");
    OutputSeq y = a_rho(power, q);
    y.tag = Tag::B;
    y.label = "B(k^-" + format_double(power) + ")";
    return y;
  }

  /// y = (I_q, 0, 0, ...).
  static OutputSeq unit_first(int q) {
    OutputSeq y;
    y.tag = Tag::ARho;
    y.rho = std::numeric_limits<double>::infinity();
    y.q = q;
    y.support = 1;
    y.weight = [](long) { return 1.0; };
    y.label = "e_1";
    return y;
  }

  /// Finitely supported y with the given blocks y_1..y_m (class B and every A_rho).
  static OutputSeq finite(std::vector<Mat> blocks) {
    if (blocks.empty()) throw InvalidInput("finite output sequence needs at least one block");
    OutputSeq y;
    y.tag = Tag::B;
    y.q = static_cast<int>(blocks[0].rows());
    y.support = static_cast<long>(blocks.size());
    y.gen = [b = std::move(blocks)](long k) { return b[static_cast<std::size_t>(k - 1)]; };
    y.label = "finite";
    return y;
  }

  static OutputSeq custom(std::function<Mat(long)> gen, int q, std::string label = "custom") {
    OutputSeq y;
    y.q = q;
    y.gen = std::move(gen);
    y.label = std::move(label);
    return y;
  }
};

/// sup_{k in [1, k_max]} k^rho ||y_k|| on a geometric sample.
inline double sampled_arho_constant(const OutputSeq& y, double rho, long k_max = 1L << 20) {
  double m = 0.0;
  for (long k = 1; k <= k_max; k = std::max(k + 1, static_cast<long>(k * 1.1)))
    m = std::max(m, std::pow(static_cast<double>(k), rho) * spectral_norm(y.at(k)));
  return m;
}

/// Partial sums of ||y_k|| up to k_max, at powers of two (Cauchy check for class B).
inline std::vector<double> sampled_b_partial_sums(const OutputSeq& y, long k_max = 1L << 16) {
  std::vector<double> out;
  double acc = 0.0;
  long next = 1;
  for (long k = 1; k <= k_max; ++k) {
    acc += spectral_norm(y.at(k));
    if (k == next) {
      out.push_back(acc);
      next *= 2;
    }
  }
  return out;
}

/// int_X^inf x^{-p} (l + x)^{-rho} dx. With x = X t^{-1/a}, a = p - 1 + rho,
/// this is X^{1-p} / a int_0^1 (l s^{1/a} + X)^{-rho} ds.
inline double power_weight_tail(long l, double X, double p, double rho) {
  const double a = p - 1.0 + rho;
  const auto f = [&](double s) { return std::pow(l * std::pow(s, 1.0 / a) + X, -rho); };
  return std::pow(X, 1.0 - p) / a * boost::math::quadrature::gauss<double, 20>::integrate(f, 0.0, 1.0);
}

struct InfiniteSolveOptions {
  double tail_tol = 1e-9;
  long j_start = 1L << 12;  // at least 4 nmax is used
  long j_cap = 1L << 21;
};

/// z_1..z_nmax of the semi-infinite system plus truncation metadata.
struct InfiniteSolution {
  std::vector<Mat> z;  // z[k-1] = z_k
  long terms = 0;      // j-range used in w_l = sum_j a~_j y_{l+j}
  double last_change = 0.0;
  bool converged = true;

  const Mat& at(long k) const { return z.at(static_cast<std::size_t>(k - 1)); }
};

/// z_s = sum_t (T_inf(w)^{-1})^{s,t} y_t for s = 1..nmax, evaluated as
/// z_s = sum_{l<=s} a~*_{s-l} w_l with w_l = sum_{j>=0} a~_j y_{l+j}. The
/// j-sum is cut at J with a power-law tail correction; J doubles until the
/// corrected w change by less than tail_tol.
inline InfiniteSolution solve_infinite_range(const ArCoeffs& coeffs, const OutputSeq& y, long nmax,
                                             InfiniteSolveOptions opt = {}) {
  if (nmax < 1) throw InvalidInput("solve_infinite: nmax must be >= 1");
  if (y.q != coeffs.q()) throw InvalidInput("solve_infinite: block size mismatch");
  const int q = coeffs.q();
  for (long k = 1; k <= (1L << 20); k *= 2)
    if (!std::isfinite(spectral_norm(y.at(k)))) throw DomainError("solve_infinite: y is not bounded");

  InfiniteSolution sol;
  const double d = coeffs.d();
  const bool analytic = y.scalar() && std::isfinite(y.power) && d > 0.0;
  // w_l for the current J, with tail correction.
  const auto compute_w = [&](long J, std::vector<Mat>& w) {
    const auto v = coeffs.view(J + 1);
    const CoeffSeq& at = v.a_tilde();
    w.assign(static_cast<std::size_t>(nmax), Mat::Zero(q, q));
    parallel_for(static_cast<std::size_t>(nmax), [&](std::size_t i) {
      const long l = static_cast<long>(i) + 1;
      const long jmax = y.support > 0 ? std::min(J, y.support - l) : J;
      if (jmax < 0) return;
      Mat acc = Mat::Zero(q, q);
      if (y.scalar()) {
        Eigen::VectorXcd c(jmax + 1);
        for (long j = 0; j <= jmax; ++j) c(j) = y.weight(l + j);
        for (int r = 0; r < q; ++r) {
          Eigen::Map<const Mat, 0, Eigen::OuterStride<>> cols(at.storage().data() + static_cast<long>(r) * q, q,
                                                              jmax + 1, Eigen::OuterStride<>(static_cast<long>(q) * q));
          acc.col(r) = cols * c;
        }
      } else {
        for (long j = 0; j <= jmax; ++j) acc.noalias() += at[j] * y.at(l + j);
      }
      if (y.support == 0 && jmax >= 8) {
        if (analytic) {
          // a~_j ~ a~_J (J/j)^{1+d}, summed against (l+j)^{-rho} as an integral.
          const double X = jmax + 0.5;
          acc += at[jmax] * (std::pow(static_cast<double>(jmax), 1.0 + d) * power_weight_tail(l, X, 1.0 + d, y.power));
        } else {
          const double f_last = spectral_norm(at[jmax] * y.at(l + jmax));
          const double f_half = spectral_norm(at[jmax / 2] * y.at(l + jmax / 2));
          const double tail = power_tail(f_half, f_last, jmax / 2, static_cast<double>(jmax));
          if (std::isfinite(tail) && f_last > 0.0) acc += (at[jmax] * y.at(l + jmax)) * (tail / f_last);
        }
      }
      w[i] = std::move(acc);
    });
  };

  std::vector<Mat> w, w_prev;
  long J = y.support > 0 ? std::max<long>(y.support, 1) : std::max(opt.j_start, 4 * nmax);
  compute_w(J, w);
  if (y.support == 0) {
    for (;;) {
      if (2 * J > opt.j_cap) {
        sol.converged = false;
        break;
      }
      w_prev = w;
      J *= 2;
      compute_w(J, w);
      double change = 0.0;
      for (long i = 0; i < nmax; ++i) change = std::max(change, spectral_norm(w[i] - w_prev[i]));
      sol.last_change = change;
      if (change < opt.tail_tol) break;
    }
  }
  sol.terms = J;
  const auto v = coeffs.view(nmax);
  const CoeffSeq& at = v.a_tilde();
  sol.z.assign(static_cast<std::size_t>(nmax), Mat::Zero(q, q));
  for (long s = 1; s <= nmax; ++s) {
    Mat acc = Mat::Zero(q, q);
    for (long l = 1; l <= s; ++l) acc.noalias() += at[s - l].adjoint() * w[l - 1];
    sol.z[s - 1] = std::move(acc);
  }
  return sol;
}

inline Mat solve_infinite(const ArCoeffs& coeffs, const OutputSeq& y, long k, InfiniteSolveOptions opt = {}) {
  return solve_infinite_range(coeffs, y, k, opt).at(k);
}

/// Stacked y_n = (y_1, ..., y_n).
inline Mat stack_output(const OutputSeq& y, long n) {
  Mat out(n * y.q, y.q);
  for (long k = 1; k <= n; ++k) out.middleRows((k - 1) * y.q, y.q) = y.at(k);
  return out;
}

/// Solution of T_n(w) z_n = y_n as a (qn) x q stack.
inline Mat solve_finite(const BlockToeplitz& T, const OutputSeq& y) {
  if (T.q() != y.q) throw InvalidInput("solve_finite: block size mismatch");
  return solve(T, stack_output(y, T.n()));
}

/// J_n = sum_{s<=n} sum_{t>n} ||(T_inf^{-1})^{s,t}|| ||y_t||, with
/// (T_inf^{-1})^{s,t} = Q_{t-s}(s), Q_D(s) = sum_{j<s} a~*_j a~_{j+D}. The
/// t-sum runs to n + horizon and a power-law tail is added per s.
inline double baxter_J(const ArCoeffs& coeffs, const OutputSeq& y, long n, long horizon) {
  const long T_end = y.support > 0 ? std::min(n + horizon, y.support) : n + horizon;
  if (T_end <= n) return 0.0;
  const int q = coeffs.q();
  const long Dmax = T_end - 1;
  const auto v = coeffs.view(n + Dmax + 1);
  const CoeffSeq& at = v.a_tilde();
  std::vector<double> ynorm(static_cast<std::size_t>(T_end + 1), 0.0);
  for (long t = n + 1; t <= T_end; ++t) ynorm[t] = spectral_norm(y.at(t));
  // Q[D-1] = Q_D(s), updated in s.
  Mat Q = Mat::Zero(q, q * Dmax);
  double total = 0.0;
  for (long s = 1; s <= n; ++s) {
    const long j = s - 1;
    for (long D = std::max(1L, n + 1 - s); D <= Dmax; ++D)
      Q.middleCols((D - 1) * q, q).noalias() += at[j].adjoint() * at[j + D];
    double acc = 0.0;
    for (long t = n + 1; t <= T_end; ++t) acc += spectral_norm(Q.middleCols((t - s - 1) * q, q)) * ynorm[t];
    if (y.support == 0 && T_end - n >= 8) {
      const long th = n + (T_end - n) / 2;
      const double f_half = spectral_norm(Q.middleCols((th - s - 1) * q, q)) * ynorm[th];
      const double f_last = spectral_norm(Q.middleCols((T_end - s - 1) * q, q)) * ynorm[T_end];
      const double tail = power_tail(f_half, f_last, static_cast<double>(th), static_cast<double>(T_end));
      if (std::isfinite(tail)) acc += tail;
    }
    total += acc;
  }
  return total;
}

/// Exponent predicted for sum_k ||z_k - z_{k,n}||.
inline double predicted_baxter_exponent(const OutputSeq& y, double d, std::optional<double> kappa = std::nullopt) {
  switch (y.tag) {
    case OutputSeq::Tag::ARho: {
      if (!std::isfinite(y.rho)) return -d;
      if (y.rho < 1.0 - d - 1e-12) return 1.0 - 2.0 * d - y.rho;
      return -d;  // at rho = 1 - d with an extra log factor
    }
    case OutputSeq::Tag::B:
      return -d + kappa.value_or(d / (2.0 * (1.0 - d))) * (1.0 - d);
    case OutputSeq::Tag::Custom:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct BaxterOptions {
  InfiniteSolveOptions solve;
  long j_horizon_factor = 16;  // J_n t-range: n + factor * n
  long fit_min_n = 0;          // fit only n >= fit_min_n (0: whole grid)
  std::optional<double> kappa;
};

struct BaxterResult {
  std::vector<long> n_grid;
  std::vector<double> errors;  // sum_{k<=n} ||z_k - z_{k,n}||
  std::vector<double> I;
  std::vector<double> J;
  double predicted_slope = 0.0;
  RateFitReport fit;        // over n >= fit_min_n
  RateFitReport fit_full;   // over the whole grid
  RateFitReport log_ratio;  // error * n^d against log n
  bool converged = true;
};

inline RateFitReport fit_window(const std::vector<long>& n, const std::vector<double>& y, long n_min) {
  std::vector<double> x, v;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] >= n_min) {
      x.push_back(static_cast<double>(n[i]));
      v.push_back(y[i]);
    }
  return loglog_fit(x, v);
}

inline BaxterResult baxter_error(const ArfimaSymbol& sym, const OutputSeq& y, const std::vector<long>& n_grid,
                                 BaxterOptions opt = {}) {
  if (n_grid.empty()) throw InvalidInput("baxter_error: empty grid");
  if (y.tag == OutputSeq::Tag::ARho && std::isfinite(y.rho) && !(y.rho > 1.0 - 2.0 * sym.d()))
    throw DomainError("baxter_error: A_rho class needs rho > 1 - 2d");
  const long nmax = *std::max_element(n_grid.begin(), n_grid.end());
  AutocovSeq seq(sym);
  ArCoeffs coeffs(sym, 2 * nmax + 2);
  const InfiniteSolution zinf = solve_infinite_range(coeffs, y, nmax, opt.solve);

  BaxterResult r;
  r.n_grid = n_grid;
  r.converged = zinf.converged;
  const std::size_t G = n_grid.size();
  r.errors.assign(G, 0.0);
  r.I.assign(G, 0.0);
  r.J.assign(G, 0.0);
  const int q = sym.q();
  for (std::size_t gi = 0; gi < G; ++gi) {
    const long n = n_grid[gi];
    const BlockToeplitz T = build_Tn(seq, n);
    const Mat zn = solve_finite(T, y);
    double err = 0.0;
    for (long k = 1; k <= n; ++k) err += spectral_norm(zn.middleRows((k - 1) * q, q) - zinf.at(k));
    r.errors[gi] = err;
    const ErrorSums es = error_sums(cholesky_inverse(T), truncated_infinite_inverse(coeffs, n).matrix);
    double I = 0.0;
    for (long t = 1; t <= n; ++t) I += es.C(t - 1) * spectral_norm(y.at(t));
    r.I[gi] = I;
    r.J[gi] = baxter_J(coeffs, y, n, opt.j_horizon_factor * n);
  }
  const double d = sym.d();
  r.predicted_slope = predicted_baxter_exponent(y, d, opt.kappa);
  r.fit_full = fit_window(n_grid, r.errors, 0);
  r.fit = fit_window(n_grid, r.errors, opt.fit_min_n);
  std::vector<double> lx, ratio;
  for (std::size_t gi = 0; gi < G; ++gi) {
    lx.push_back(std::log(static_cast<double>(n_grid[gi])));
    ratio.push_back(r.errors[gi] * std::pow(static_cast<double>(n_grid[gi]), d));
  }
  r.log_ratio = linear_fit(lx, ratio);
  return r;
}

struct PredictorReport {
  std::vector<long> n_grid;
  std::vector<double> phi_sum;   // sum_k ||phi_{n,k} - phi_k||
  std::vector<double> vsum;      // ||v_{n+1}^{-1} - v_inf^{-1}|| + sum_k ||v_{n+1}^{-1} phi_{n,k} - v_inf^{-1} phi_k||
  std::vector<double> v_norm;    // ||v_{n+1}||
  Mat v_inf_inverse;
  std::vector<Mat> phi_inf;      // phi_k, k = 1..nmax
  std::vector<double> phi_partial_sums;  // sum_{k<=2^i} ||phi_k||
  RateFitReport phi_fit;
  RateFitReport vsum_fit;
  double predicted_slope = 0.0;
};

/// Infinite predictor pieces from the semi-infinite system on w~ with
/// y = (I, 0, ...): z_1 = v_inf^{-1}, z_{k+1} = -phi_k^* v_inf^{-1}.
inline std::pair<Mat, std::vector<Mat>> infinite_predictor(const ArCoeffs& coeffs, long nmax) {
  const ArCoeffs rev = coeffs.reversed();
  const auto sol = solve_infinite_range(rev, OutputSeq::unit_first(coeffs.q()), nmax + 1);
  const Mat vinv = sol.at(1);
  const Mat v = vinv.inverse();
  std::vector<Mat> phi(static_cast<std::size_t>(nmax));
  for (long k = 1; k <= nmax; ++k) phi[k - 1] = -(sol.at(k + 1) * v).adjoint();
  return {vinv, phi};
}

inline PredictorReport predictor_convergence(const ArfimaSymbol& sym, const std::vector<long>& n_grid,
                                             long fit_min_n = 0) {
  if (n_grid.empty()) throw InvalidInput("predictor_convergence: empty grid");
  const long nmax = *std::max_element(n_grid.begin(), n_grid.end());
  AutocovSeq seq(sym);
  ArCoeffs coeffs(sym, nmax + 2);
  PredictorReport r;
  r.n_grid = n_grid;
  r.predicted_slope = -sym.d();
  auto [vinv, phi] = infinite_predictor(coeffs, nmax);
  r.v_inf_inverse = vinv;
  r.phi_inf = phi;
  {
    double acc = 0.0;
    long next = 1;
    for (long k = 1; k <= nmax; ++k) {
      acc += spectral_norm(phi[k - 1]);
      if (k == next || k == nmax) {
        r.phi_partial_sums.push_back(acc);
        next *= 2;
      }
    }
  }
  const int q = sym.q();
  const auto gam = seq.gammas(nmax + 1);
  for (long n : n_grid) {
    const Predictor p = predictor_coefficients(gam, n);
    double s1 = 0.0;
    for (long k = 1; k <= n; ++k) s1 += spectral_norm(p.phi[k - 1] - phi[k - 1]);
    // Inverse column of T_{n+1}(w~) against its semi-infinite counterpart.
    const Mat col = solve_finite(build_Tn_reversed(seq, n + 1), OutputSeq::unit_first(q));
    double vs = spectral_norm(col.topRows(q) - vinv);
    for (long k = 1; k <= n; ++k) vs += spectral_norm(col.middleRows(k * q, q) + phi[k - 1].adjoint() * vinv);
    r.phi_sum.push_back(s1);
    r.vsum.push_back(vs);
    r.v_norm.push_back(spectral_norm(p.v));
  }
  r.phi_fit = fit_window(n_grid, r.phi_sum, fit_min_n);
  r.vsum_fit = fit_window(n_grid, r.vsum, fit_min_n);
  return r;
}

}  // namespace tlm
