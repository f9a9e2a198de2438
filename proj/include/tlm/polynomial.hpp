#pragma once

/// @file
/// Complex polynomials in ascending-power storage: p(z) = c[0] + c[1] z + ...

#include "tlm/core.hpp"

#include <Eigen/Eigenvalues>

namespace tlm {

using Poly = std::vector<cd>;

inline cd poly_eval(const Poly& p, cd z) {
  cd acc{0.0, 0.0};
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

inline bool poly_is_zero(const Poly& p) {
  return std::all_of(p.begin(), p.end(), [](cd c) { return c == cd{0.0, 0.0}; });
}

/// Drops trailing coefficients that are negligible relative to the largest one.
inline Poly poly_trim(Poly p, double rel_tol = 1e-14) {
  double scale = 0.0;
  for (cd c : p) scale = std::max(scale, std::abs(c));
  while (p.size() > 1 && std::abs(p.back()) <= rel_tol * scale) p.pop_back();
  return p;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, cd{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), cd{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

inline Poly poly_scale(Poly a, cd s) {
  for (cd& c : a) c *= s;
  return a;
}

/// Coefficient-wise conjugate: the polynomial z -> conj(p(conj z)).
inline Poly poly_conj(Poly a) {
  for (cd& c : a) c = std::conj(c);
  return a;
}

/// Roots via eigenvalues of the companion matrix. Leading zeros are trimmed
/// first; a constant polynomial has no roots.
inline std::vector<cd> poly_roots(const Poly& p_in) {
  const Poly p = poly_trim(p_in);
  const auto deg = static_cast<Eigen::Index>(p.size()) - 1;
  if (deg <= 0) return {};
  Mat companion = Mat::Zero(deg, deg);
  const cd lead = p.back();
  for (Eigen::Index i = 0; i < deg; ++i) companion(0, i) = -p[deg - 1 - i] / lead;
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = cd{1.0, 0.0};
  Eigen::ComplexEigenSolver<Mat> solver(companion, /*computeEigenvectors=*/false);
  std::vector<cd> roots(deg);
  for (Eigen::Index i = 0; i < deg; ++i) roots[i] = solver.eigenvalues()(i);
  return roots;
}

/// Taylor coefficients of num(z)/den(z) at z = 0, from den * s = num.
/// Requires den[0] != 0.
inline std::vector<cd> rational_taylor(const Poly& num, const Poly& den, std::size_t count) {
  std::vector<cd> s(count, cd{0.0, 0.0});
  const cd d0 = den.at(0);
  for (std::size_t k = 0; k < count; ++k) {
    cd acc = k < num.size() ? num[k] : cd{0.0, 0.0};
    const std::size_t jmax = std::min(k, den.size() - 1);
    for (std::size_t j = 1; j <= jmax; ++j) acc -= den[j] * s[k - j];
    s[k] = acc / d0;
  }
  return s;
}

}  // namespace tlm
