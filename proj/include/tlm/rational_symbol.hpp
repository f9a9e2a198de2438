#pragma once

/// @file
/// Spectral symbols of vector ARFIMA processes:
///   w(e^{it}) = |1 - e^{it}|^{-2d} g(e^{it}) g(e^{it})^*,
/// where g is a q x q matrix of rational functions with no poles and no
/// determinant zeros in the closed unit disk (condition (C)).

#include "tlm/polynomial.hpp"

#include <optional>
#include <sstream>

namespace tlm {

struct RationalEntry {
  Poly num;
  Poly den;
};

/// q x q matrix of rational functions of z. Denominators are stored with
/// constant coefficient 1 whenever that coefficient is nonzero.
class RationalMatrixFn {
 public:
  RationalMatrixFn() = default;

  /// Row-major entries; entries.size() must equal q*q.
  RationalMatrixFn(int q, std::vector<RationalEntry> entries) : q_(q), entries_(std::move(entries)) {
    if (q_ < 1) throw InvalidInput("rational matrix: q must be >= 1");
    if (entries_.size() != static_cast<std::size_t>(q_) * q_)
      throw InvalidInput("rational matrix: expected q*q entries");
    for (auto& e : entries_) {
      if (e.num.empty() || e.den.empty()) throw InvalidInput("rational matrix: empty polynomial");
      if (poly_is_zero(e.den)) throw InvalidInput("rational matrix: all-zero denominator");
      if (e.den[0] != cd{0.0, 0.0}) {
        const cd c0 = e.den[0];
        e.den = poly_scale(e.den, 1.0 / c0);
        e.num = poly_scale(e.num, 1.0 / c0);
      }
    }
  }

  static RationalMatrixFn scalar(Poly num, Poly den = {1.0}) {
    return RationalMatrixFn(1, {RationalEntry{std::move(num), std::move(den)}});
  }

  static RationalMatrixFn identity(int q) {
    std::vector<RationalEntry> e(static_cast<std::size_t>(q) * q, RationalEntry{{0.0}, {1.0}});
    for (int i = 0; i < q; ++i) e[static_cast<std::size_t>(i) * q + i].num = {1.0};
    return RationalMatrixFn(q, std::move(e));
  }

  static RationalMatrixFn diagonal(const std::vector<RationalEntry>& diag) {
    const int q = static_cast<int>(diag.size());
    std::vector<RationalEntry> e(static_cast<std::size_t>(q) * q, RationalEntry{{0.0}, {1.0}});
    for (int i = 0; i < q; ++i) e[static_cast<std::size_t>(i) * q + i] = diag[i];
    return RationalMatrixFn(q, std::move(e));
  }

  /// Constant matrix.
  static RationalMatrixFn constant(const Mat& m) {
    const int q = static_cast<int>(m.rows());
    std::vector<RationalEntry> e;
    e.reserve(static_cast<std::size_t>(q) * q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) e.push_back({{m(i, j)}, {1.0}});
    return RationalMatrixFn(q, std::move(e));
  }

  int q() const noexcept { return q_; }
  const RationalEntry& entry(int i, int j) const { return entries_.at(static_cast<std::size_t>(i) * q_ + j); }
  const std::vector<RationalEntry>& entries() const noexcept { return entries_; }

  Mat eval(cd z) const {
    Mat m(q_, q_);
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j) {
        const auto& e = entry(i, j);
        m(i, j) = poly_eval(e.num, z) / poly_eval(e.den, z);
      }
    return m;
  }

  bool is_diagonal() const {
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j)
        if (i != j && !poly_is_zero(entry(i, j).num)) return false;
    return true;
  }

  /// f^#(z) := f(conj z)^*, i.e. transpose with conjugated coefficients.
  RationalMatrixFn reflect() const {
    std::vector<RationalEntry> e;
    e.reserve(entries_.size());
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j) e.push_back({poly_conj(entry(j, i).num), poly_conj(entry(j, i).den)});
    return RationalMatrixFn(q_, std::move(e));
  }

  /// Taylor coefficients F_0..F_{count-1} of f(z) = sum F_k z^k.
  std::vector<Mat> taylor(std::size_t count) const {
    std::vector<Mat> out(count, Mat::Zero(q_, q_));
    for (int i = 0; i < q_; ++i)
      for (int j = 0; j < q_; ++j) {
        const auto s = rational_taylor(entry(i, j).num, entry(i, j).den, count);
        for (std::size_t k = 0; k < count; ++k) out[k](i, j) = s[k];
      }
    return out;
  }

  /// det f = numerator / denominator, by cofactor expansion in polynomial
  /// arithmetic (intended for q <= 4).
  std::pair<Poly, Poly> determinant() const {
    std::vector<int> rows(q_), cols(q_);
    for (int i = 0; i < q_; ++i) rows[i] = cols[i] = i;
    return det_rec(rows, cols);
  }

  /// Determinant of the submatrix without row i and column j.
  std::pair<Poly, Poly> minor(int i, int j) const {
    if (q_ == 1) return {Poly{1.0}, Poly{1.0}};
    std::vector<int> rows, cols;
    for (int k = 0; k < q_; ++k) {
      if (k != i) rows.push_back(k);
      if (k != j) cols.push_back(k);
    }
    return det_rec(rows, cols);
  }

  /// f^{-1} via cofactors. Requires det f(0) != 0.
  RationalMatrixFn inverse() const {
    const auto [dn, dd] = determinant();
    std::vector<RationalEntry> e;
    e.reserve(entries_.size());
    for (int r = 0; r < q_; ++r)
      for (int c = 0; c < q_; ++c) {
        auto [mn, md] = minor(c, r);
        Poly num = poly_trim(poly_mul(mn, dd), 1e-15);
        const Poly den = poly_trim(poly_mul(md, dn), 1e-15);
        if ((r + c) % 2 == 1) num = poly_scale(num, -1.0);
        e.push_back({num, den});
      }
    return RationalMatrixFn(q_, std::move(e));
  }

 private:
  std::pair<Poly, Poly> det_rec(const std::vector<int>& rows, const std::vector<int>& cols) const {
    if (rows.size() == 1) {
      const auto& e = entry(rows[0], cols[0]);
      return {e.num, e.den};
    }
    Poly num{0.0};
    Poly den{1.0};
    const std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& e = entry(rows[0], cols[c]);
      if (poly_is_zero(e.num)) continue;
      std::vector<int> sub_cols;
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (k != c) sub_cols.push_back(cols[k]);
      auto [mn, md] = det_rec(sub_rows, sub_cols);
      Poly tn = poly_mul(e.num, mn);
      if (c % 2 == 1) tn = poly_scale(tn, -1.0);
      const Poly td = poly_mul(e.den, md);
      num = poly_add(poly_mul(num, td), poly_mul(tn, den));
      den = poly_mul(den, td);
    }
    return {num, den};
  }

  int q_ = 0;
  std::vector<RationalEntry> entries_;
};

/// Outcome of a condition (C) check.
struct ConditionCReport {
  enum class Kind { Pole, DeterminantZero, DeterminantVanishes };
  struct Offender {
    Kind kind;
    int row = -1;  // entry position for poles, -1 for determinant issues
    int col = -1;
    cd root{0.0, 0.0};
  };

  bool pass = true;
  std::vector<Offender> offenders;

  std::string summary() const {
    if (pass) return "condition (C) satisfied";
    std::ostringstream os;
    os << "condition (C) violated:";
    for (const auto& o : offenders) {
      switch (o.kind) {
        case Kind::Pole:
          os << " pole of entry (" << o.row << "," << o.col << ") at " << o.root << " |z|=" << std::abs(o.root) << ";";
          break;
        case Kind::DeterminantZero:
          os << " det zero at " << o.root << " |z|=" << std::abs(o.root) << ";";
          break;
        case Kind::DeterminantVanishes:
          os << " determinant vanishes identically;";
          break;
      }
    }
    return os.str();
  }
};

/// Checks condition (C): no denominator root and no determinant-numerator
/// root with modulus <= 1 + tol. Boundary roots fail.
inline ConditionCReport validate_condition_C(const RationalMatrixFn& f, double tol = 1e-9) {
  ConditionCReport rep;
  for (int i = 0; i < f.q(); ++i)
    for (int j = 0; j < f.q(); ++j) {
      const auto& e = f.entry(i, j);
      if (e.num.empty() || e.den.empty() || poly_is_zero(e.den))
        throw InvalidInput("condition (C): degenerate polynomial in entry");
      if (poly_is_zero(e.num)) continue;  // identically zero entry has no poles
      for (cd r : poly_roots(e.den))
        if (std::abs(r) <= 1.0 + tol) rep.offenders.push_back({ConditionCReport::Kind::Pole, i, j, r});
    }
  const auto [dnum, dden] = f.determinant();
  const Poly trimmed = poly_trim(dnum, 1e-13);
  if (poly_is_zero(trimmed) || (trimmed.size() == 1 && std::abs(trimmed[0]) < 1e-300)) {
    rep.offenders.push_back({ConditionCReport::Kind::DeterminantVanishes, -1, -1, {}});
  } else {
    for (cd r : poly_roots(trimmed))
      if (std::abs(r) <= 1.0 + tol) rep.offenders.push_back({ConditionCReport::Kind::DeterminantZero, -1, -1, r});
  }
  rep.pass = rep.offenders.empty();
  return rep;
}

/// Number of circle points used when validating a symbol.
inline constexpr int kSymbolValidationGrid = 512;

/// The symbol w under (F_d), stored through its factors g and g_sharp with
/// g g^* = g_sharp^* g_sharp on the unit circle.
class ArfimaSymbol {
 public:
  /// Validates and builds a symbol. When g_sharp is omitted, g must be
  /// diagonal (then g_sharp = g).
  static ArfimaSymbol make(double d, RationalMatrixFn g, std::optional<RationalMatrixFn> g_sharp = std::nullopt) {
    if (!(d >= 0.0 && d < 0.5)) throw DomainError("memory parameter d must lie in [0, 1/2)");
    if (!g_sharp) {
      if (!g.is_diagonal())
        throw InvalidInput("g_sharp must be supplied when g is not diagonal");
      g_sharp = g;
    }
    if (g_sharp->q() != g.q()) throw InvalidInput("g and g_sharp have different block sizes");
    ArfimaSymbol s;
    s.d_ = d;
    s.g_ = std::move(g);
    s.g_sharp_ = std::move(*g_sharp);
    s.validate();
    return s;
  }

  /// White noise of dimension q (the d = 0 degenerate fixture).
  static ArfimaSymbol white_noise(int q) { return make(0.0, RationalMatrixFn::identity(q)); }

  /// Scalar FARIMA(0, d, 0).
  static ArfimaSymbol farima(double d) { return make(d, RationalMatrixFn::identity(1)); }

  double d() const noexcept { return d_; }
  int q() const noexcept { return g_.q(); }
  bool degenerate() const noexcept { return d_ == 0.0; }
  const RationalMatrixFn& g() const noexcept { return g_; }
  const RationalMatrixFn& g_sharp() const noexcept { return g_sharp_; }
  double factorization_residual() const noexcept { return residual_; }

  /// g(e^{it}) g(e^{it})^*, the smooth part of w.
  Mat smooth_part(double theta) const {
    const Mat gv = g_.eval(std::polar(1.0, theta));
    return gv * gv.adjoint();
  }

  /// g(e^{it})^* g_sharp(e^{it})^{-1}, the smooth part of the phase function.
  Mat phase_smooth_part(double theta) const {
    const cd z = std::polar(1.0, theta);
    return g_.eval(z).adjoint() * g_sharp_.eval(z).inverse();
  }

 private:
  void validate() {
    const auto rg = validate_condition_C(g_);
    if (!rg.pass) throw ConditionCError("g: " + rg.summary());
    const auto rs = validate_condition_C(g_sharp_);
    if (!rs.pass) throw ConditionCError("g_sharp: " + rs.summary());
    double worst = 0.0;
    double scale = 1.0;
    for (int i = 0; i < kSymbolValidationGrid; ++i) {
      const double theta = -pi + 2.0 * pi * (i + 0.5) / kSymbolValidationGrid;
      const cd z = std::polar(1.0, theta);
      const Mat gv = g_.eval(z);
      const Mat sv = g_sharp_.eval(z);
      const Mat left = gv * gv.adjoint();
      const Mat right = sv.adjoint() * sv;
      worst = std::max(worst, spectral_norm(left - right));
      scale = std::max(scale, spectral_norm(left));
      Eigen::SelfAdjointEigenSolver<Mat> es(left, Eigen::EigenvaluesOnly);
      if (!(es.eigenvalues()(0) > 1e-14 * spectral_norm(left)))
        throw InvalidInput("g g^* is not positive definite on the unit circle");
    }
    residual_ = worst;
    if (worst > 1e-8 * scale)
      throw InvalidInput("g g^* != g_sharp^* g_sharp on the unit circle (residual " + std::to_string(worst) + ")");
  }

  double d_ = 0.0;
  RationalMatrixFn g_;
  RationalMatrixFn g_sharp_;
  double residual_ = 0.0;
};

/// w(e^{it}). Throws SingularityError at theta = 0 (mod 2 pi) when d > 0.
inline Mat eval_symbol(const ArfimaSymbol& sym, double theta) {
  const cd z = std::polar(1.0, theta);
  const double dist = std::abs(cd{1.0, 0.0} - z);
  if (sym.d() > 0.0 && dist == 0.0) throw SingularityError("w is singular at theta = 0");
  const double weight = sym.d() > 0.0 ? std::pow(dist, -2.0 * sym.d()) : 1.0;
  return weight * sym.smooth_part(theta);
}

/// Symbol of the time-reversed process, w~(e^{it}) = w(e^{-it}). Same d;
/// the new g is g_sharp^# and the new g_sharp is g^#.
inline ArfimaSymbol time_reverse(const ArfimaSymbol& sym) {
  return ArfimaSymbol::make(sym.d(), sym.g_sharp().reflect(), sym.g().reflect());
}

}  // namespace tlm
