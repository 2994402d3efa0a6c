#include <gtest/gtest.h>

#include "smirnov/blaschke_smirnov.hpp"
#include "support/random_functions.hpp"

using namespace smirnov;
using testing_support::random_helson;
using testing_support::random_helson_up_to;

namespace {

const ComplexPolynomial kOnePlusZ({1.0, 1.0});
const ComplexPolynomial kOneMinusZ({1.0, -1.0});

RationalRealSmirnov phi3() { return from_rational(poly::pow(kOnePlusZ, 4), poly::pow(kOneMinusZ, 4)); }
RationalRealSmirnov koebe() { return from_rational(ComplexPolynomial({0.0, 1.0}), poly::pow(kOneMinusZ, 2)); }
RationalRealSmirnov phi5() { return from_rational(ComplexPolynomial({0.0, kI}), ComplexPolynomial({1.0, 0.0, -1.0})); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Blaschke, UnimodularOnCircleAndVanishesAtZeros) {
  FiniteBlaschkeProduct b({cplx(0.5, 0.1), 0.0, cplx(-0.3, -0.6)}, std::polar(1.0, 0.7));
  for (int k = 0; k < 50; ++k) EXPECT_NEAR(std::abs(b(std::polar(1.0, 0.13 * k))), 1.0, 1e-13);
  for (cplx a : b.zeros()) EXPECT_LT(std::abs(b(a)), 1e-15);
  const cplx z(0.2, -0.4);
  EXPECT_LT(std::abs(b.numerator()(z) / b.denominator()(z) - b(z)), 1e-14);
}

TEST(Blaschke, RejectsBadZerosAndConstants) {
  EXPECT_EQ(code_of([] { FiniteBlaschkeProduct({cplx(1.0, 0.0)}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { FiniteBlaschkeProduct({}, 2.0); }), ErrorCode::InvalidArgument);
}

TEST(FromBlaschke, CayleyFixture) {
  const auto f = from_blaschke(FiniteBlaschkeProduct(), FiniteBlaschkeProduct::monomial(1));
  EXPECT_EQ(f.num(), ComplexPolynomial({kI, kI}));
  EXPECT_EQ(f.den(), ComplexPolynomial({1.0, -1.0}));
  EXPECT_EQ(f.v_plus_nominal(), 1);
  EXPECT_EQ(f.v_minus_nominal(), 0);
  const auto g = from_blaschke(FiniteBlaschkeProduct::monomial(1), FiniteBlaschkeProduct());
  EXPECT_EQ(halfplane_valences(g), std::make_pair(0, 1));
}

TEST(FromBlaschke, Errors) {
  EXPECT_EQ(code_of([] {
              from_blaschke(FiniteBlaschkeProduct({0.3}), FiniteBlaschkeProduct({0.3 + 1e-10}));
            }),
            ErrorCode::NotRelativelyPrime);
  // z^2 and (0.9 - z)/(1 - 0.9 z) cross on the real segment (0.7, 0.75).
  EXPECT_EQ(code_of([] {
              from_blaschke(FiniteBlaschkeProduct({0.0, 0.0}), FiniteBlaschkeProduct({cplx(0.9, 0.0)}));
            }),
            ErrorCode::DenominatorVanishesInDisk);
  EXPECT_EQ(code_of([] { from_blaschke(FiniteBlaschkeProduct(), FiniteBlaschkeProduct()); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] {
              from_blaschke(FiniteBlaschkeProduct::monomial(13), FiniteBlaschkeProduct({cplx(0.5)}));
            }),
            ErrorCode::InvalidArgument);
}

TEST(FromRational, Errors) {
  EXPECT_EQ(code_of([] { from_rational(ComplexPolynomial({1.0}), ComplexPolynomial({-0.5, 1.0})); }),
            ErrorCode::DenominatorVanishesInDisk);
  EXPECT_EQ(code_of([] { from_rational(ComplexPolynomial({0.0, 1.0}), ComplexPolynomial({1.0})); }),
            ErrorCode::BoundaryNotReal);
}

TEST(FromRational, CancelsCommonFactor) {
  // z (1+z) / ((1-z)(z - 2)) has no common factor; multiply both by (z - 0.5).
  const ComplexPolynomial extra({-0.5, 1.0});
  const auto f = from_rational(ComplexPolynomial({0.0, 1.0}) * extra, poly::pow(kOneMinusZ, 2) * extra);
  EXPECT_EQ(f.den().degree(), 2);
  EXPECT_EQ(halfplane_valences(f), std::make_pair(1, 1));
}

TEST(FixtureValences, HalfPlanes) {
  EXPECT_EQ(halfplane_valences(phi3()), std::make_pair(2, 2));
  EXPECT_EQ(halfplane_valences(koebe()), std::make_pair(1, 1));
  EXPECT_EQ(halfplane_valences(phi5()), std::make_pair(1, 1));
  EXPECT_EQ(deficiency_indices(phi3()), std::make_pair(2, 2));
}

TEST(FixtureValences, RealPoints) {
  // phi3 = w^4: two preimages of x < 0, one of x > 0.
  EXPECT_EQ(valence_at(phi3(), -2.0).count, 2);
  EXPECT_EQ(valence_at(phi3(), 3.0).count, 1);
  EXPECT_EQ(valence_at(koebe(), 1.0).count, 1);
  EXPECT_EQ(valence_at(koebe(), -1.0).count, 0);
  EXPECT_EQ(valence_at(phi5(), 0.2).count, 1);
  EXPECT_EQ(valence_at(phi5(), 0.7).count, 0);
}

TEST(BoundaryValue, CayleyFormIsExactForFixtures) {
  for (const auto& f : {phi3(), koebe(), phi5()}) {
    for (const cplx c : f.cayley_numerator()) EXPECT_EQ(c.imag(), 0.0);
    for (const cplx c : f.cayley_denominator()) EXPECT_EQ(c.imag(), 0.0);
  }
  // Koebe at -1 is -1/4; phi5 at i is -1/2; phi3 at 1 is a pole.
  EXPECT_NEAR(boundary_value(koebe(), std::numbers::pi).value, -0.25, 1e-15);
  EXPECT_NEAR(boundary_value(phi5(), std::numbers::pi / 2).value, -0.5, 1e-15);
  EXPECT_TRUE(boundary_value(phi3(), 0.0).pole);
}

// Property: boundary values agree with direct evaluation away from poles.
TEST(BoundaryValue, MatchesDirectEvaluation) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_helson_up_to(rng, 3);
    for (int k = 0; k < 64; ++k) {
      const double t = 0.1 + 0.097 * k;
      const auto b = boundary_value(f, t);
      const auto v = f.eval(std::polar(1.0, t));
      if (b.pole || v.infinite || std::abs(v.value) > 1e4) continue;
      EXPECT_LT(std::abs(b.value - v.value.real()), 1e-8 * std::max(1.0, std::abs(b.value)));
      EXPECT_LT(std::abs(v.value.imag()), 1e-8 * std::max(1.0, std::abs(b.value)));
    }
  }
}

// Property: the Helson form reproduces (phi - i)/(phi + i) = B2/B1.
TEST(Helson, ConventionHolds) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_helson_up_to(rng, 4);
    const auto& h = *f.helson_pair();
    for (int k = 0; k < 64; ++k) {
      const cplx z(u(rng), u(rng));
      const cplx p = f.eval(z).value;
      EXPECT_LT(std::abs((p - kI) / (p + kI) - h.b2(z) / h.b1(z)), 1e-9);
      EXPECT_LT(std::abs(p - kI * (h.b1(z) + h.b2(z)) / (h.b1(z) - h.b2(z))), 1e-9 * std::max(1.0, std::abs(p)));
    }
  }
}

TEST(Helson, RebuiltPairMatches) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_helson_up_to(rng, 3);
    const auto h = to_helson(f);
    EXPECT_EQ(h.b1.degree(), f.helson_pair()->b1.degree());
    EXPECT_EQ(h.b2.degree(), f.helson_pair()->b2.degree());
    const cplx z(0.1, 0.2);
    EXPECT_LT(std::abs(h.b2(z) / h.b1(z) - f.helson_pair()->b2(z) / f.helson_pair()->b1(z)), 1e-8);
  }
  const auto h3 = to_helson(phi3());
  EXPECT_EQ(h3.b1.degree(), 2);
  EXPECT_EQ(h3.b2.degree(), 2);
}

TEST(Helson, DegreeLaw) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_helson_up_to(rng, 4);
    const auto [vp, vm] = halfplane_valences(f, trial, 20);
    EXPECT_EQ(vp, f.helson_pair()->b2.degree());
    EXPECT_EQ(vm, f.helson_pair()->b1.degree());
  }
}

TEST(RealAffine, SwapsValencesForNegativeScale) {
  std::mt19937_64 rng(59);
  const auto f = random_helson(rng, 2, 1);
  const auto g = real_affine(f, -2.5, 0.75);
  // f has (v+, v-) = (deg B2, deg B1) = (1, 2); a < 0 swaps them.
  EXPECT_EQ(g.v_plus_nominal(), 2);
  EXPECT_EQ(g.v_minus_nominal(), 1);
  EXPECT_EQ(halfplane_valences(g), std::make_pair(2, 1));
  const cplx z(0.3, -0.2);
  EXPECT_LT(std::abs(g.eval(z).value - (-2.5 * f.eval(z).value + 0.75)), 1e-10);
  EXPECT_EQ(halfplane_valences(real_affine(f, 3.0, -1.0)), std::make_pair(1, 2));
}

TEST(PrecomposeInner, ValenceMultiplies) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_helson_up_to(rng, 2);
    const auto c = testing_support::random_blaschke(rng, 1 + trial % 3, 0.6);
    const auto g = precompose_inner(f, c);
    const auto [vp, vm] = halfplane_valences(f);
    EXPECT_EQ(halfplane_valences(g), std::make_pair(c.degree() * vp, c.degree() * vm));
    const cplx z(-0.2, 0.35);
    EXPECT_LT(std::abs(g.eval(z).value - f.eval(c(z)).value), 1e-8 * std::max(1.0, std::abs(g.eval(z).value)));
  }
}

// Independent oracle: Parseval on the Taylor series.
TEST(IntegralMeans, ParsevalForPhi5AndKoebe) {
  for (double r : {0.3, 0.8, 0.95}) {
    const double m5 = std::sqrt(r * r / (1 - std::pow(r, 4)));
    EXPECT_NEAR(integral_means(phi5(), 2.0, r), m5, 1e-8 * m5);
    const double mk = std::sqrt(r * r * (1 + r * r) / std::pow(1 - r * r, 3));
    EXPECT_NEAR(integral_means(koebe(), 2.0, r), mk, 1e-8 * mk);
  }
  EXPECT_EQ(code_of([] { integral_means(koebe(), -1.0, 0.5); }), ErrorCode::InvalidArgument);
}

TEST(IntegralMeans, KoebeGrowthSplitsAtHalf) {
  const auto k = koebe();
  EXPECT_LT(integral_means(k, 0.25, 0.9999) / integral_means(k, 0.25, 0.99), 3.0);
  EXPECT_GT(integral_means(k, 0.75, 0.9999) / integral_means(k, 0.75, 0.99), 10.0);
}
