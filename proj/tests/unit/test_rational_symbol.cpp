#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace tlm;

TEST(ConditionC, ConstantIdentityPasses) {
  const auto rep = validate_condition_C(RationalMatrixFn::identity(3));
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.offenders.empty());
}

TEST(ConditionC, PoleOutsideDiskPasses) {
  const auto rep = validate_condition_C(RationalMatrixFn::scalar({1.0}, {1.0, -0.5}));
  EXPECT_TRUE(rep.pass);
}

TEST(ConditionC, BoundaryZeroFails) {
  const auto rep = validate_condition_C(RationalMatrixFn::scalar({1.0, -1.0}));
  ASSERT_FALSE(rep.pass);
  ASSERT_EQ(rep.offenders.size(), 1u);
  EXPECT_EQ(rep.offenders[0].kind, ConditionCReport::Kind::DeterminantZero);
  EXPECT_NEAR(std::abs(rep.offenders[0].root - cd{1.0, 0.0}), 0.0, 1e-12);
}

TEST(ConditionC, PoleInsideDiskFails) {
  const auto rep = validate_condition_C(RationalMatrixFn::scalar({1.0}, {1.0, -2.0}));
  ASSERT_FALSE(rep.pass);
  EXPECT_EQ(rep.offenders[0].kind, ConditionCReport::Kind::Pole);
  EXPECT_NEAR(std::abs(rep.offenders[0].root), 0.5, 1e-12);
}

TEST(ConditionC, SingularDeterminantFails) {
  // [[1, 1], [1, 1]] has identically zero determinant.
  const RationalMatrixFn f(2, {{{1.0}, {1.0}}, {{1.0}, {1.0}}, {{1.0}, {1.0}}, {{1.0}, {1.0}}});
  const auto rep = validate_condition_C(f);
  ASSERT_FALSE(rep.pass);
  EXPECT_EQ(rep.offenders[0].kind, ConditionCReport::Kind::DeterminantVanishes);
}

TEST(ConditionC, MatrixDeterminantZeroInsideDiskFails) {
  // det [[1, z], [2, 1]] = 1 - 2z vanishes at z = 1/2.
  const RationalMatrixFn f(2, {{{1.0}, {1.0}}, {{0.0, 1.0}, {1.0}}, {{2.0}, {1.0}}, {{1.0}, {1.0}}});
  const auto rep = validate_condition_C(f);
  ASSERT_FALSE(rep.pass);
  EXPECT_NEAR(std::abs(rep.offenders[0].root - cd{0.5, 0.0}), 0.0, 1e-12);
}

TEST(ConditionC, DegeneratePolynomialRejected) {
  EXPECT_THROW(RationalMatrixFn::scalar({1.0}, {0.0, 0.0}), InvalidInput);
  EXPECT_THROW(RationalMatrixFn::scalar({}, {1.0}), InvalidInput);
}

TEST(RationalMatrixFn, DenominatorNormalized) {
  const auto f = RationalMatrixFn::scalar({2.0}, {2.0, -1.0});
  EXPECT_EQ(f.entry(0, 0).den[0], cd(1.0, 0.0));
  EXPECT_NEAR(std::abs(f.eval(0.3)(0, 0) - 2.0 / (2.0 - 0.3)), 0.0, 1e-15);
}

TEST(RationalMatrixFn, InverseMatchesPointwiseInverse) {
  const auto sym = fixtures::twisted(0.2);
  const auto inv = sym.g().inverse();
  for (cd z : {cd{0.3, 0.1}, cd{-0.7, 0.2}, std::polar(1.0, 2.0)})
    EXPECT_LT((inv.eval(z) - sym.g().eval(z).inverse()).norm(), 1e-13);
}

TEST(RationalMatrixFn, TaylorMatchesEvaluation) {
  const auto g = fixtures::twisted(0.2).g();
  const auto c = g.taylor(80);
  const cd z{0.2, -0.3};
  Mat acc = Mat::Zero(2, 2);
  cd p{1.0, 0.0};
  for (const auto& m : c) {
    acc += p * m;
    p *= z;
  }
  EXPECT_LT((acc - g.eval(z)).norm(), 1e-13);
}

TEST(ArfimaSymbol, DomainOfD) {
  EXPECT_THROW(ArfimaSymbol::farima(0.5), DomainError);
  EXPECT_THROW(ArfimaSymbol::farima(-0.1), DomainError);
  EXPECT_NO_THROW(ArfimaSymbol::farima(0.0));
  EXPECT_TRUE(ArfimaSymbol::farima(0.0).degenerate());
}

TEST(ArfimaSymbol, NonDiagonalNeedsSharpFactor) {
  const auto g = fixtures::twisted(0.2).g();
  EXPECT_THROW(ArfimaSymbol::make(0.2, g), InvalidInput);
}

TEST(ArfimaSymbol, WrongSharpFactorRejected) {
  const auto t = fixtures::twisted(0.2);
  EXPECT_THROW(ArfimaSymbol::make(0.2, t.g(), t.g()), InvalidInput);
}

TEST(ArfimaSymbol, ConditionCEnforced) {
  EXPECT_THROW(ArfimaSymbol::make(0.2, RationalMatrixFn::scalar({1.0, -1.0})), ConditionCError);
}

TEST(ArfimaSymbol, FactorizationResidualSmall) {
  for (const auto& s : {fixtures::farima(0.25), fixtures::diag2(0.25), fixtures::twisted(0.25), fixtures::ar1()}) {
    EXPECT_LT(s.factorization_residual(), 1e-8);
    EXPECT_TRUE(validate_condition_C(s.g()).pass);
    EXPECT_TRUE(validate_condition_C(s.g_sharp()).pass);
  }
}

TEST(EvalSymbol, WhiteNoiseIsIdentity) {
  const auto s = fixtures::white(3);
  for (double th : {-2.0, 0.0, 0.5, pi}) EXPECT_LT((eval_symbol(s, th) - Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(EvalSymbol, FarimaAtPi) {
  EXPECT_NEAR(eval_symbol(fixtures::farima(0.25), pi)(0, 0).real(), 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(EvalSymbol, FarimaEven) {
  const auto s = fixtures::farima(0.25);
  EXPECT_NEAR(std::abs(eval_symbol(s, pi / 3)(0, 0) - eval_symbol(s, -pi / 3)(0, 0)), 0.0, 1e-14);
}

TEST(EvalSymbol, SingularAtZero) {
  EXPECT_THROW(eval_symbol(fixtures::farima(0.25), 0.0), SingularityError);
}

TEST(EvalSymbol, HermitianPositiveAndReflectionSymmetric) {
  // w(e^{-it}) = conj-transpose relation holds only for real-coefficient g;
  // for every symbol w is Hermitian positive definite.
  for (const auto& s : {fixtures::diag2(0.3), fixtures::twisted(0.3)}) {
    for (int i = 1; i < 64; ++i) {
      const double th = -pi + 2.0 * pi * i / 64.0 + 0.01;
      const Mat w = eval_symbol(s, th);
      EXPECT_LT(hermitian_defect(w), 1e-13);
      Eigen::SelfAdjointEigenSolver<Mat> es(w);
      EXPECT_GT(es.eigenvalues()(0), 0.0);
    }
  }
  const auto r = fixtures::diag2(0.3);
  for (double th : {0.3, 1.1, 2.9})
    EXPECT_LT((eval_symbol(r, th) - eval_symbol(r, -th).adjoint()).norm(), 1e-13);
}

TEST(TimeReverse, RealScalarIsUnchanged) {
  const auto s = ArfimaSymbol::make(0.2, RationalMatrixFn::scalar({1.0, 0.4}, {1.0, -0.3}));
  const auto r = time_reverse(s);
  for (int i = 0; i < 512; ++i) {
    const double th = -pi + 2.0 * pi * (i + 0.5) / 512.0;
    EXPECT_NEAR(std::abs(eval_symbol(s, th)(0, 0) - eval_symbol(r, th)(0, 0)), 0.0, 1e-13);
  }
}

TEST(TimeReverse, ReflectsTheSymbol) {
  const auto s = fixtures::twisted(0.3);
  const auto r = time_reverse(s);
  EXPECT_EQ(r.d(), s.d());
  double diff_to_w = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double th = -pi + 2.0 * pi * (i + 0.5) / 512.0;
    EXPECT_LT((eval_symbol(r, th) - eval_symbol(s, -th)).norm(), 1e-12);
    diff_to_w = std::max(diff_to_w, (eval_symbol(r, th) - eval_symbol(s, th)).norm());
  }
  EXPECT_GT(diff_to_w, 1e-2);  // the fixture is genuinely not time-reversible
}

TEST(TimeReverse, Involution) {
  const auto s = fixtures::twisted(0.3);
  const auto rr = time_reverse(time_reverse(s));
  EXPECT_EQ(rr.d(), s.d());
  for (int i = 0; i < 512; ++i) {
    const cd z = std::polar(1.0, -pi + 2.0 * pi * (i + 0.5) / 512.0);
    EXPECT_LT((rr.g().eval(z) - s.g().eval(z)).norm(), 1e-13);
    EXPECT_LT((rr.g_sharp().eval(z) - s.g_sharp().eval(z)).norm(), 1e-13);
  }
}
