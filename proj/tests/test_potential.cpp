#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vism/potential.hpp"

using namespace vism;
using vism::testing::close_abs;
using vism::testing::close_rel;

namespace {
const PrecisionContext kCtx(30);

HPReal dec(const char* s) { return parse_decimal(s, kCtx); }

HPReal max_diff(const CouplingMatrix& a, const CouplingMatrix& b) {
  HPReal worst = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max<HPReal>(worst, abs(a.data()[i] - b.data()[i]));
  return worst;
}

CouplingMatrix combine(const CouplingMatrix& a, const HPReal& ca, const CouplingMatrix& b, const HPReal& cb) {
  CouplingMatrix out = a;
  for (std::size_t i = 0; i < a.data().size(); ++i) out.data()[i] = ca * a.data()[i] + cb * b.data()[i];
  return out;
}
}  // namespace

TEST(ParsePotential, CanonicalForms) {
  EXPECT_EQ(parse_potential("x^2 + 0.1*x^4").to_string(), "x^2 + 0.1*x^4");
  EXPECT_EQ(parse_potential("x^2 + 10*cos(10*pi*x)").to_string(), "x^2 + 10*cos(10*pi*x)");
  EXPECT_EQ(parse_potential("0").to_string(), "0");
  EXPECT_EQ(parse_potential("  0.1*x^4+x^2 ").to_string(), "x^2 + 0.1*x^4");
  EXPECT_EQ(parse_potential("x^2 - 1/3*x").to_string(), "-1/3*x + x^2");
  EXPECT_EQ(parse_potential("x^2 @shift=0.5").to_string(), "x^2 @shift=0.5");
  const auto round = parse_potential(parse_potential("-x^3 + 2*cos(pi*x) @shift=-1/4").to_string());
  EXPECT_EQ(round.to_string(), "-x^3 + 2*cos(pi*x) @shift=-1/4");
}

TEST(ParsePotential, Terms) {
  const auto p = parse_potential("3 - 2*x + x^2 + 1/10*x^4 - 0.5*cos(2.5*pi*x)");
  ASSERT_EQ(p.monomials.size(), 4u);
  EXPECT_EQ(p.monomials[0].power, 0);
  EXPECT_EQ(p.monomials[1].power, 1);
  EXPECT_EQ(p.monomials[1].coefficient.value(kCtx), -2);
  EXPECT_TRUE(close_rel(p.monomials[3].coefficient.value(kCtx), dec("0.1"), pow10_neg(30, kCtx)));
  ASSERT_EQ(p.cosines.size(), 1u);
  EXPECT_EQ(p.cosines[0].amplitude.value(kCtx), dec("-0.5"));
  EXPECT_EQ(p.cosines[0].frequency.value(kCtx), dec("2.5"));
  EXPECT_FALSE(p.is_even());
  EXPECT_TRUE(parse_potential("x^2 + 10*cos(10*pi*x)").is_even());
  EXPECT_TRUE(parse_potential("0").empty());
}

TEST(ParsePotential, Errors) {
  for (const char* bad : {"", "x^", "x^2 +", "2*y", "cos(x)", "x^2 x^4", "1/0*x^2"}) {
    try {
      parse_potential(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ParseError) << bad;
    }
  }
}

TEST(PotentialSpec, EvaluatesWithShift) {
  PrecisionScope scope(kCtx);
  auto p = parse_potential("x^2 + 2*cos(1*pi*x)");
  EXPECT_TRUE(close_abs(p(dec("0.5"), kCtx), dec("0.25"), pow10_neg(29, kCtx)));
  p.shift = Coefficient("1");
  EXPECT_TRUE(close_abs(p(dec("1.5"), kCtx), dec("0.25"), pow10_neg(29, kCtx)));
  EXPECT_FALSE(p.is_even());
}

TEST(CouplingMonomial, ConstantModeSecondMoment) {
  PrecisionScope scope(kCtx);
  for (const char* L : {"0.7", "1", "3.25"}) {
    const BasisSpec spec(BoundaryMode::Periodic, 3, dec(L));
    const auto c = coupling_monomial(spec, 2, kCtx);
    EXPECT_TRUE(close_rel(c(0, 0), spec.L * spec.L / 3, pow10_neg(29, kCtx)));
  }
}

TEST(CouplingMonomial, SineCosineBlockVanishes) {
  const BasisSpec spec(BoundaryMode::Periodic, 4, dec("2.2"));
  for (int k : {0, 2, 4}) {
    const auto c = coupling_monomial(spec, k, kCtx);
    for (const auto& a : enumerate_basis(spec))
      for (const auto& b : enumerate_basis(spec))
        if (a.kind != b.kind) EXPECT_EQ(c(a.flat, b.flat), 0);
  }
}

TEST(CouplingMonomial, QuarticMatchesQuadrature) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Periodic, 4, HPReal(3));
  const auto closed = coupling_monomial(spec, 4, kCtx);
  const auto quad = coupling_quadrature(spec, parse_potential("x^4"), kCtx, pow10_neg(28, kCtx));
  EXPECT_LT(max_diff(closed, quad), pow10_neg(20, kCtx));
}

TEST(CouplingMonomial, AllPowersBothModesMatchQuadrature) {
  PrecisionScope scope(kCtx);
  const char* pots[] = {"1", "x", "x^2", "x^3", "x^4"};
  for (auto mode : {BoundaryMode::Periodic, BoundaryMode::Confinement})
    for (int k = 0; k <= 4; ++k) {
      const BasisSpec spec(mode, 3, dec("1.9"));
      const auto quad = coupling_quadrature(spec, parse_potential(pots[k]), kCtx, pow10_neg(28, kCtx));
      EXPECT_LT(max_diff(coupling_monomial(spec, k, kCtx), quad), pow10_neg(20, kCtx))
          << to_string(mode) << " k=" << k;
    }
}

TEST(CouplingMonomial, RejectsUnsupportedExponent) {
  const BasisSpec spec(BoundaryMode::Periodic, 2, HPReal(1));
  try {
    coupling_monomial(spec, 5, kCtx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnsupportedExponent);
  }
}

TEST(CouplingCosine, ZeroAmplitude) {
  const BasisSpec spec(BoundaryMode::Periodic, 3, dec("1.5"));
  const auto c = coupling_cosine(spec, HPReal(0), dec("2"), kCtx);
  for (const auto& v : c.data()) EXPECT_EQ(v, 0);
}

TEST(CouplingCosine, FullPeriodsVanish) {
  const BasisSpec spec(BoundaryMode::Periodic, 3, HPReal(1));
  const auto c = coupling_cosine(spec, dec("4.5"), dec("2"), kCtx);
  EXPECT_TRUE(close_abs(c(0, 0), HPReal(0), pow10_neg(30, kCtx)));
}

TEST(CouplingCosine, IrrationalFrequencyMatchesQuadrature) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Periodic, 5, dec("2.1"));
  auto pot = parse_potential("1*cos(10/3*pi*x)");
  const auto closed = coupling_cosine(spec, HPReal(1), HPReal(10) / 3, kCtx);
  const auto quad = coupling_quadrature(spec, pot, kCtx, pow10_neg(28, kCtx));
  EXPECT_LT(max_diff(closed, quad), pow10_neg(20, kCtx));
}

TEST(CouplingCosine, ResonantFrequencies) {
  PrecisionScope scope(kCtx);
  // beta*L integral: basis frequencies coincide with the potential's
  for (auto mode : {BoundaryMode::Periodic, BoundaryMode::Confinement}) {
    const BasisSpec spec(mode, 4, HPReal(2));
    const auto closed = coupling_cosine(spec, dec("1.5"), HPReal(1), kCtx);
    const auto quad = coupling_quadrature(spec, parse_potential("1.5*cos(pi*x)"), kCtx, pow10_neg(28, kCtx));
    EXPECT_LT(max_diff(closed, quad), pow10_neg(20, kCtx)) << to_string(mode);
  }
}

TEST(CouplingCosine, RejectsNonPositiveFrequency) {
  const BasisSpec spec(BoundaryMode::Periodic, 2, HPReal(1));
  EXPECT_THROW(coupling_cosine(spec, HPReal(1), HPReal(0), kCtx), Error);
}

TEST(CouplingQuadrature, ZeroPotential) {
  const BasisSpec spec(BoundaryMode::Confinement, 3, HPReal(2));
  const auto c = coupling_quadrature(spec, parse_potential("0"), kCtx, pow10_neg(20, kCtx));
  for (const auto& v : c.data()) EXPECT_EQ(v, 0);
}

TEST(CouplingQuadrature, HarmonicMatchesClosedForm) {
  const BasisSpec spec(BoundaryMode::Periodic, 3, HPReal(2));
  const auto quad = coupling_quadrature(spec, parse_potential("x^2"), kCtx, pow10_neg(28, kCtx));
  EXPECT_LT(max_diff(quad, coupling_monomial(spec, 2, kCtx)), pow10_neg(25, kCtx));
}

TEST(CouplingQuadrature, Linearity) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Periodic, 3, HPReal(2));
  const auto quad = coupling_quadrature(spec, parse_potential("x^2 + 0.1*x^4"), kCtx, pow10_neg(28, kCtx));
  const auto sum = combine(coupling_monomial(spec, 2, kCtx), HPReal(1), coupling_monomial(spec, 4, kCtx), dec("0.1"));
  EXPECT_LT(max_diff(quad, sum), pow10_neg(25, kCtx));
}

TEST(AssembleCoupling, ConfinementHarmonicFirstEntry) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Confinement, 2, HPReal(1));
  const auto c = assemble_coupling(spec, parse_potential("x^2"), kCtx);
  const HPReal pi = hp_pi(kCtx);
  EXPECT_TRUE(close_abs(c(0, 0), HPReal(1) / 3 - 2 / (pi * pi), pow10_neg(29, kCtx)));
}

TEST(AssembleCoupling, EmptyPotential) {
  const BasisSpec spec(BoundaryMode::Periodic, 3, HPReal(2));
  const auto c = assemble_coupling(spec, parse_potential("0"), kCtx);
  for (const auto& v : c.data()) EXPECT_EQ(v, 0);
}

TEST(AssembleCoupling, QuarticIsLinearCombination) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Periodic, 4, dec("2.6"));
  const auto c = assemble_coupling(spec, parse_potential("x^2 + 0.1*x^4"), kCtx);
  const auto sum = combine(coupling_monomial(spec, 2, kCtx), HPReal(1), coupling_monomial(spec, 4, kCtx), dec("0.1"));
  EXPECT_LT(max_diff(c, sum), pow10_neg(29, kCtx));
}

TEST(AssembleCoupling, HighPowersUseQuadrature) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Periodic, 2, dec("1.3"));
  const auto c = assemble_coupling(spec, parse_potential("x^6"), kCtx);
  // (1/2L) * integral of x^6 over [-L, L]
  EXPECT_TRUE(close_rel(c(0, 0), pow(spec.L, 6) / 7, pow10_neg(28, kCtx)));
}

TEST(AssembleCoupling, ShiftMatchesQuadrature) {
  PrecisionScope scope(kCtx);
  auto pot = parse_potential("x^2 + 0.3*x^3 + 2*cos(1.3*pi*x)");
  pot.shift = Coefficient("0.4");
  for (auto mode : {BoundaryMode::Periodic, BoundaryMode::Confinement}) {
    const BasisSpec spec(mode, 3, dec("2.2"));
    const auto quad = coupling_quadrature(spec, pot, kCtx, pow10_neg(28, kCtx));
    EXPECT_LT(max_diff(assemble_coupling(spec, pot, kCtx), quad), pow10_neg(20, kCtx)) << to_string(mode);
  }
}

TEST(CouplingProperty, SymmetryAndParitySparsity) {
  vism::testing::Draws draws(17);
  for (int trial = 0; trial < 4; ++trial) {
    const auto mode = trial % 2 ? BoundaryMode::Confinement : BoundaryMode::Periodic;
    const BasisSpec spec(mode, draws.integer(1, 6), draws.uniform(1, 5, kCtx));
    const auto pot = parse_potential("x^2 + 0.37*x^4 - 3*cos(2.9*pi*x)");
    const auto c = assemble_coupling(spec, pot, kCtx);
    for (const auto& a : enumerate_basis(spec))
      for (const auto& b : enumerate_basis(spec)) {
        EXPECT_EQ(c(a.flat, b.flat), c(b.flat, a.flat));
        if (parity(spec, a) != parity(spec, b))
          EXPECT_TRUE(close_abs(c(a.flat, b.flat), HPReal(0), pow10_neg(28, kCtx)));
      }
  }
}

TEST(CouplingProperty, LinearityInTerms) {
  PrecisionScope scope(kCtx);
  const BasisSpec spec(BoundaryMode::Confinement, 4, dec("2.75"));
  const auto f1 = parse_potential("x + x^3");
  const auto f2 = parse_potential("x^2 + 2*cos(0.7*pi*x)");
  const auto both = parse_potential("-1.5*x + 2*x^2 - 1.5*x^3 + 4*cos(0.7*pi*x)");
  const auto lhs = assemble_coupling(spec, both, kCtx);
  const auto rhs = combine(assemble_coupling(spec, f1, kCtx), dec("-1.5"), assemble_coupling(spec, f2, kCtx), HPReal(2));
  EXPECT_LT(max_diff(lhs, rhs), pow10_neg(28, kCtx));
}

TEST(CouplingProperty, RandomInstancesAgreeWithQuadrature) {
  const PrecisionContext ctx(20);
  PrecisionScope scope(ctx);
  vism::testing::Draws draws(23);
  for (int trial = 0; trial < 3; ++trial) {
    const auto mode = trial % 2 ? BoundaryMode::Confinement : BoundaryMode::Periodic;
    const BasisSpec spec(mode, draws.integer(1, 6), draws.uniform(1, 5, ctx));
    const auto pot = parse_potential("0.5*x - x^2 + 0.2*x^3 + 0.05*x^4 + 1.1*cos(3.3*pi*x)");
    const auto quad = coupling_quadrature(spec, pot, ctx, pow10_neg(19, ctx));
    EXPECT_LT(max_diff(assemble_coupling(spec, pot, ctx), quad), pow10_neg(12, ctx));
  }
}
