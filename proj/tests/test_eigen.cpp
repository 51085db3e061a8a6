#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vism/eigen.hpp"

using namespace vism;
using vism::testing::close_abs;
using vism::testing::close_rel;

namespace {
const PrecisionContext kCtx(30);

DenseMatrix<HPReal> random_symmetric(std::size_t n, unsigned seed) {
  PrecisionScope scope(kCtx);
  vism::testing::Draws draws(seed);
  DenseMatrix<HPReal> m(n, n, HPReal(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = draws.uniform(-3, 3, kCtx);
  return m;
}

HPReal dot(const std::vector<HPReal>& a, const std::vector<HPReal>& b) {
  HPReal s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// max_n || M v_n - e_n v_n ||_inf
HPReal worst_residual(const DenseMatrix<HPReal>& m, const Spectrum& s) {
  HPReal worst = 0;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t r = 0; r < m.rows(); ++r) {
      HPReal acc = -s.eigenvalues[k] * s.eigenvectors[k][r];
      for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * s.eigenvectors[k][c];
      worst = std::max<HPReal>(worst, abs(acc));
    }
  return worst;
}
}  // namespace

TEST(Eigh, Identity) {
  const auto s = eigh(DenseMatrix<HPReal>::identity(3), kCtx);
  for (const auto& e : s.eigenvalues) EXPECT_EQ(e, 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_TRUE(close_abs(dot(s.eigenvectors[i], s.eigenvectors[j]), HPReal(i == j), pow10_neg(30, kCtx)));
}

TEST(Eigh, TwoByTwoClosedForm) {
  PrecisionScope scope(kCtx);
  DenseMatrix<HPReal> m(2, 2, HPReal(1));
  m(0, 0) = m(1, 1) = 2;
  const auto s = eigh(m, kCtx);
  const HPReal tol = pow10_neg(30, kCtx);
  EXPECT_TRUE(close_abs(s.eigenvalues[0], HPReal(1), tol));
  EXPECT_TRUE(close_abs(s.eigenvalues[1], HPReal(3), tol));
  const HPReal r = 1 / sqrt(HPReal(2));
  // (1,-1)/sqrt2: the tie between |components| goes to index 0, which is made positive
  EXPECT_TRUE(close_abs(s.eigenvectors[0][0], r, tol));
  EXPECT_TRUE(close_abs(s.eigenvectors[0][1], -r, tol));
  EXPECT_TRUE(close_abs(s.eigenvectors[1][0], r, tol));
  EXPECT_TRUE(close_abs(s.eigenvectors[1][1], r, tol));
}

TEST(Eigh, ReconstructionRandom8) {
  PrecisionScope scope(kCtx);
  const auto m = random_symmetric(8, 42);
  const auto s = eigh(m, kCtx);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      HPReal acc = 0;
      for (std::size_t k = 0; k < 8; ++k) acc += s.eigenvalues[k] * s.eigenvectors[k][i] * s.eigenvectors[k][j];
      EXPECT_TRUE(close_abs(acc, m(i, j), pow10_neg(static_cast<long>(kCtx.digits() - kCtx.guard_digits()), kCtx)));
    }
}

TEST(Eigh, ValuesOnlyMatchesFull) {
  const auto m = random_symmetric(7, 5);
  const auto a = eigh(m, kCtx);
  const auto b = eigh(m, kCtx, {false, 50});
  EXPECT_FALSE(b.has_vectors());
  for (std::size_t i = 0; i < 7; ++i) EXPECT_TRUE(close_rel(a.eigenvalues[i], b.eigenvalues[i], pow10_neg(30, kCtx)));
}

TEST(Eigh, RejectsAsymmetric) {
  auto m = random_symmetric(4, 1);
  m(0, 3) += 1;
  try {
    eigh(m, kCtx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotSymmetric);
  }
}

TEST(Eigh, SweepLimit) {
  const auto m = random_symmetric(6, 9);
  try {
    eigh(m, kCtx, {true, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoConvergence);
  }
}

TEST(Eigh, DoubleTemplateKernel) {
  DenseMatrix<double> m(3, 3, 0.0);
  m(0, 0) = 2;
  m(1, 1) = 2;
  m(2, 2) = 5;
  m(0, 1) = m(1, 0) = 1;
  auto r = detail::jacobi_eigen(m, 1e-14, 50, true);
  std::sort(r.values.begin(), r.values.end());
  EXPECT_NEAR(r.values[0], 1, 1e-13);
  EXPECT_NEAR(r.values[1], 3, 1e-13);
  EXPECT_NEAR(r.values[2], 5, 1e-13);
}

TEST(EighProperty, OrthonormalTraceResidualSigns) {
  PrecisionScope scope(kCtx);
  for (unsigned seed : {1u, 2u, 3u}) {
    const std::size_t n = 5 + seed * 3;
    const auto m = random_symmetric(n, seed);
    const auto s = eigh(m, kCtx);
    HPReal trace = 0, sum = 0;
    for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
    for (const auto& e : s.eigenvalues) sum += e;
    EXPECT_TRUE(close_rel(sum, trace, pow10_neg(static_cast<long>(kCtx.digits() - kCtx.guard_digits()), kCtx)));
    EXPECT_LE(worst_residual(m, s),
              pow10_neg(static_cast<long>(kCtx.digits() - kCtx.guard_digits()), kCtx) * inf_norm(m));
    for (std::size_t i = 0; i < n; ++i) {
      if (i) EXPECT_LE(s.eigenvalues[i - 1], s.eigenvalues[i]);
      EXPECT_TRUE(close_abs(dot(s.eigenvectors[i], s.eigenvectors[i]), HPReal(1), pow10_neg(29, kCtx)));
      for (std::size_t j = 0; j < i; ++j)
        EXPECT_LT(abs(dot(s.eigenvectors[i], s.eigenvectors[j])), pow10_neg(15, kCtx));
      HPReal big = 0;
      std::size_t at = 0;
      for (std::size_t r = 0; r < n; ++r)
        if (abs(s.eigenvectors[i][r]) > big) {
          big = abs(s.eigenvectors[i][r]);
          at = r;
        }
      EXPECT_GT(s.eigenvectors[i][at], 0);
    }
  }
}

TEST(EighProperty, HighPrecision) {
  const PrecisionContext ctx(120);
  PrecisionScope scope(ctx);
  vism::testing::Draws draws(77);
  DenseMatrix<HPReal> m(10, 10, HPReal(0));
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i; j < 10; ++j) m(i, j) = m(j, i) = draws.uniform(-1, 1, ctx) / 3;
  const auto s = eigh(m, ctx);
  EXPECT_LE(worst_residual(m, s), pow10_neg(110, ctx) * inf_norm(m));
}

TEST(EighBlockwise, HarmonicParityAlternation) {
  const BasisSpec spec(BoundaryMode::Periodic, 10, HPReal(5));
  const auto s = eigh_blockwise(assemble(spec, parse_potential("x^2"), kCtx), kCtx);
  const Parity expect[] = {Parity::Even, Parity::Odd, Parity::Even, Parity::Odd};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s.parity[i], expect[i]);
  ASSERT_TRUE(s.source);
}

TEST(EighBlockwise, MatchesFullSolveAndZeroPads) {
  const BasisSpec spec(BoundaryMode::Confinement, 6, HPReal(4));
  const auto h = assemble(spec, parse_potential("x^2 + 0.1*x^4"), kCtx);
  const auto blocked = eigh_blockwise(h, kCtx);
  const auto full = eigh(h.D, kCtx);
  for (std::size_t i = 0; i < full.size(); ++i) {
    EXPECT_TRUE(close_rel(blocked.eigenvalues[i], full.eigenvalues[i], pow10_neg(28, kCtx)));
    for (const auto& idx : enumerate_basis(spec))
      if (parity(spec, idx) != blocked.parity[i]) EXPECT_EQ(blocked.eigenvectors[i][idx.flat], 0);
    // non-degenerate spectrum: vectors agree up to the shared sign convention
    for (std::size_t r = 0; r < full.size(); ++r)
      EXPECT_TRUE(close_abs(blocked.eigenvectors[i][r], full.eigenvectors[i][r], pow10_neg(20, kCtx)));
  }
}

TEST(EighBlockwise, FreeParticleDegeneracy) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Periodic, 4, HPReal(1));
  const auto s = eigh_blockwise(assemble(spec, parse_potential("0"), kCtx), kCtx);
  EXPECT_EQ(s.eigenvalues[0], 0);
  const HPReal pi = hp_pi(kCtx);
  for (int m = 1; m <= 4; ++m) {
    const HPReal k2 = m * m * pi * pi;
    EXPECT_TRUE(close_rel(s.eigenvalues[2 * m - 1], k2, pow10_neg(30, kCtx)));
    EXPECT_TRUE(close_rel(s.eigenvalues[2 * m], k2, pow10_neg(30, kCtx)));
    EXPECT_NE(s.parity[2 * m - 1], s.parity[2 * m]);
  }
}

TEST(EighBlockwise, RequiresBlocks) {
  const BasisSpec spec(BoundaryMode::Periodic, 2, HPReal(1));
  EXPECT_THROW(eigh_blockwise(assemble(spec, parse_potential("x"), kCtx), kCtx), Error);
}
