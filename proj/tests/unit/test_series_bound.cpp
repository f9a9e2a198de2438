#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace tlm;

namespace {

// T_n^{-1} - [T_inf^{-1}]_n from the exact inverse.
BlockMatrix exact_difference(const ArfimaSymbol& s, const ArCoeffs& c, long n) {
  AutocovSeq seq(s);
  BlockMatrix D = cholesky_inverse(build_Tn(seq, n));
  D.dense() -= truncated_infinite_inverse(c, n).matrix.dense();
  return D;
}

}  // namespace

TEST(BTilde, BaseLevelIsConjugatedBeta) {
  const auto s = fixtures::twisted(0.3);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, 6, {.ell_max = 20, .k_max = 2});
  for (long u = 1; u <= 6; ++u)
    for (long l = 0; l < 20; ++l) EXPECT_LT((tab.block(1, u, l) - ph.beta(6 + 1 - u + l).adjoint()).norm(), 1e-15);
}

TEST(BTilde, RecursionStep) {
  const auto s = fixtures::twisted(0.3);
  PhaseCoeffs ph(s);
  const long n = 5, L = 12;
  const auto tab = build_btilde(ph, n, {.ell_max = L, .k_max = 2});
  for (long u = 1; u <= n; ++u)
    for (long l = 0; l < L; ++l) {
      Mat even = Mat::Zero(2, 2), odd = Mat::Zero(2, 2);
      for (long m = 0; m < L; ++m) even += tab.block(1, u, m) * ph.beta(n + 1 + m + l);
      for (long m = 0; m < L; ++m) odd += tab.block(2, u, m) * ph.beta(n + 1 + m + l).adjoint();
      EXPECT_LT((tab.block(2, u, l) - even).norm(), 1e-13);
      EXPECT_LT((tab.block(3, u, l) - odd).norm(), 1e-13);
    }
}

TEST(BTilde, WhiteNoiseVanishes) {
  PhaseCoeffs ph(fixtures::white(2));
  const auto tab = build_btilde(ph, 8);
  for (double m : tab.level_max_norms()) EXPECT_LT(m, 1e-14);
}

TEST(BTilde, LevelsContract) {
  PhaseCoeffs ph(fixtures::farima(0.25));
  const auto tab = build_btilde(ph, 16);
  const auto& m = tab.level_max_norms();
  for (long k = 2; k < 8; ++k) EXPECT_LT(m[k], m[k - 1]) << "level " << k + 1;
  EXPECT_LT(tab.k_tail_estimate(), tab.tail_tol());
}

TEST(BTilde, InsufficientBetaRejected) {
  PhaseCoeffs ph(fixtures::farima(0.25));
  EXPECT_THROW(BTildeTable::build(ph.table(0, 50), 0.25, 16, {}), InvalidInput);
}

TEST(KeyEquality, WhiteNoiseZero) {
  const auto s = fixtures::white(2);
  ArCoeffs c(s, 64);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, 8);
  EXPECT_LT(key_equality_matrix(c, tab).diff.dense().norm(), 1e-14);
  EXPECT_LT(key_equality_diff(c, tab, 3, 5).first.norm(), 1e-14);
}

TEST(KeyEquality, SingleBlockMatchesMatrixForm) {
  const auto s = fixtures::twisted(0.25);
  ArCoeffs c(s, 64);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, 8);
  const auto M = key_equality_matrix(c, tab);
  for (auto [i, j] : {std::pair{1L, 1L}, {8L, 8L}, {3L, 7L}, {7L, 2L}}) {
    const auto [v, b] = key_equality_diff(c, tab, i, j);
    EXPECT_LT((v - M.diff.block(i, j)).norm(), 1e-12);
    EXPECT_NEAR(b, M.bound(i - 1, j - 1), 1e-9 + 1e-6 * b);
  }
}

TEST(KeyEquality, MatchesExactInverse) {
  for (const auto& s : {fixtures::farima(0.25), fixtures::diag2(0.25), fixtures::twisted(0.25)}) {
    ArCoeffs c(s, 64);
    PhaseCoeffs ph(s);
    for (long n : {8, 16}) {
      const auto tab = build_btilde(ph, n);
      const auto K = key_equality_matrix(c, tab);
      const auto E = exact_difference(s, c, n);
      for (long i = 1; i <= n; ++i)
        for (long j = 1; j <= n; ++j)
          EXPECT_LE(spectral_norm(K.diff.block(i, j) - E.block(i, j)), K.bound(i - 1, j - 1) + 1e-6)
              << "n=" << n << " s=" << i << " t=" << j;
    }
  }
}

TEST(KeyEquality, HermitianPairing) {
  const auto s = fixtures::farima(0.25);
  ArCoeffs c(s, 64);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, 16);
  const auto K = key_equality_matrix(c, tab);
  for (long i = 1; i <= 16; ++i)
    for (long j = 1; j <= 16; ++j)
      EXPECT_LE(spectral_norm(K.diff.block(i, j) - K.diff.block(j, i).adjoint()),
                K.bound(i - 1, j - 1) + K.bound(j - 1, i - 1) + 1e-12);
}

TEST(SSums, Trivial) {
  PhaseCoeffs w(fixtures::white(1));
  const auto tw = build_btilde(w, 8);
  const auto z = s_sums(tw, 1, 0, 0);
  EXPECT_EQ(z.S1, 0.0);
  EXPECT_EQ(z.S2, 0.0);
  PhaseCoeffs ph(fixtures::farima(0.25));
  const auto tab = build_btilde(ph, 8);
  EXPECT_EQ(s_sums(tab, 3, 2, 0).S2, 0.0);
  EXPECT_THROW(s_sums(tab, 1, 8, 0), InvalidInput);
}

TEST(SSums, BruteForceFirstLevel) {
  const double d = 0.25;
  PhaseCoeffs ph(fixtures::farima(d));
  const long n = 16;
  const auto tab = build_btilde(ph, n);
  double ref = 0.0;
  for (long l = 0; l < tab.ell_max(); ++l)
    ref += std::abs(std::sin(pi * d) / (pi * (16.0 + l - d))) / std::pow(l + 2.0, 1.0 + d);
  EXPECT_NEAR(s_sums(tab, 1, 0, 0).S1, ref, 1e-13);
}

TEST(SSums, MatrixFormMatchesDirect) {
  const auto s = fixtures::twisted(0.25);
  ArCoeffs c(s, 512);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, 8, {.k_max = 3});
  const auto K = empirical_constants(c, 512);
  const RealMat M = tnbound_matrix(tab, K);
  for (long i = 1; i <= 8; ++i)
    for (long j = 1; j <= 8; ++j) EXPECT_NEAR(M(i - 1, j - 1), tnbound_rhs(tab, K, i, j), 1e-12 * M(i - 1, j - 1));
}

TEST(Tnbound, WhiteNoiseZero) {
  const auto s = fixtures::white(1);
  ArCoeffs c(s, 64);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, 8);
  EXPECT_EQ(tnbound_matrix(tab, empirical_constants(c, 64)).maxCoeff(), 0.0);
}

TEST(Tnbound, DominatesSeries) {
  const auto s = fixtures::farima(0.25);
  const long n = 16;
  ArCoeffs c(s, 4096);
  PhaseCoeffs ph(s);
  const auto tab = build_btilde(ph, n);
  const auto K = key_equality_matrix(c, tab);
  const RealMat B = tnbound_matrix(tab, empirical_constants(c, 4096));
  for (long i = 1; i <= n; ++i)
    for (long j = 1; j <= n; ++j)
      EXPECT_GE(B(i - 1, j - 1), spectral_norm(K.diff.block(i, j)) - K.bound(i - 1, j - 1));
  // Decreasing in t for fixed s near the head; over larger t the bound turns
  // up again, as the exact Delta does.
  for (long i = 1; i <= n / 2; ++i)
    for (long j = 2; j <= n / 4; ++j) EXPECT_LE(B(i - 1, j - 1), B(i - 1, j - 2) * (1.0 + 1e-12));
}
