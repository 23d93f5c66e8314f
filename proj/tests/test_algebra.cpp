#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ratrelu/algebra.hpp"
#include "ratrelu/relunet.hpp"

using namespace ratrelu;

namespace {
using P = SparsePoly<double>;
using Term = P::Term;

P x1() { return P::variable(1, 0); }
P one(int d = 1) { return P::constant(d, 1.0); }
RationalFn<double> poly_rat(P p, Interval iv = Interval(-1, 1)) { return RationalFn<double>::polynomial(std::move(p), {iv}); }

P random_poly(std::mt19937_64& rng, int dim, int max_deg, int terms) {
  std::vector<Term> t;
  for (int i = 0; i < terms; ++i) {
    std::vector<Exponent> e(static_cast<std::size_t>(dim));
    int budget = max_deg;
    for (auto& v : e) {
      v = static_cast<Exponent>(rng() % static_cast<unsigned>(budget + 1));
      budget -= static_cast<int>(v);
    }
    t.push_back({uniform(rng, -1.0, 1.0), e});
  }
  return P(dim, t);
}
}  // namespace

TEST(PolyEval, Examples) {
  UniPoly<double> sq({0.0, 0.0, 1.0});
  EXPECT_EQ(sq(3.0), 9.0);
  FactoredUniPoly f{1.0, {-1.0, -2.0}};
  EXPECT_EQ(f(0.0), 2.0);
  P xy(2, {{1.0, {1, 1}}});
  std::vector<double> pt{0.5, 0.25};
  EXPECT_EQ(xy.eval(pt), 0.125);
  EXPECT_THROW(xy.eval(std::vector<double>{1.0}), PreconditionError);
}

TEST(UniPoly, DegreeOfZeroAndTrim) {
  UniPoly<double> z({0.0, 0.0});
  EXPECT_EQ(z.degree(), -1);
  EXPECT_TRUE(z.is_zero());
  UniPoly<double> p({1.0, 2.0, 0.0});
  EXPECT_EQ(p.degree(), 1);
}

TEST(SparsePoly, DifferenceOfSquares) {
  const P p = mul(x1() + one(), x1() - one());
  ASSERT_EQ(p.term_count(), 2u);
  EXPECT_EQ(p.to_uni().coeffs(), (std::vector<double>{-1.0, 0.0, 1.0}));
}

TEST(SparsePoly, SelfCancellation) {
  const P p(1, {{2.0, {3}}, {-1.5, {1}}});
  const P z = p + p.scaled(-1.0);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.term_count(), 0u);
}

TEST(SparsePoly, BinomialPower) {
  const P p = pow(x1() + one(), 10);
  EXPECT_EQ(p.to_uni().coeff(5), 252.0);
  EXPECT_EQ(p.to_uni().coeff(10), 1.0);
  EXPECT_EQ(p.term_count(), 11u);
}

TEST(SparsePoly, TermCapRaisesBlowup) {
  const P p = P::affine({1.0, 1.0}, 1.0);
  ArithmeticLimits lim{50};
  EXPECT_THROW(pow(p, 20, lim), BlowupError);
}

TEST(SparsePoly, MapFallbackMatchesDenseAccumulation) {
  // widely spread exponents push the product onto the ordered-map path
  const P a(2, {{1.0, {0, 0}}, {2.0, {4000, 1}}, {-1.0, {1, 3000}}});
  const P b(2, {{1.0, {1, 0}}, {0.5, {3000, 2}}});
  const P c = mul(a, b);
  std::vector<double> pt{0.999, 0.9995};
  EXPECT_NEAR(c.eval(pt), a.eval(pt) * b.eval(pt), 1e-12);
  EXPECT_EQ(c.term_count(), 6u);
}

TEST(SparsePoly, MulEvaluatesPointwiseProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 3;
    const P p = random_poly(rng, dim, 8, 6), q = random_poly(rng, dim, 8, 6);
    const P pq = mul(p, q);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> x(static_cast<std::size_t>(dim));
      for (auto& v : x) v = uniform(rng, -1, 1);
      const double lhs = pq.eval(x), rhs = p.eval(x) * q.eval(x);
      double scale = 0.0;
      for (std::size_t i = 0; i < pq.term_count(); ++i) scale += std::abs(pq.coef(i));
      EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, scale));
    }
  }
}

TEST(RatAdd, Constants) {
  const auto c = poly_rat(one());
  const auto s = rat_add(c, c);
  EXPECT_EQ(s.num, P::constant(1, 2.0));
  EXPECT_EQ(s.den, one());
}

TEST(RatAdd, LikeDenominatorsStayUnreduced) {
  const RationalFn<double> f(one(), x1(), {Interval(1, 2)});
  const auto s = rat_add(f, f);
  EXPECT_EQ(s.num, x1().scaled(2.0));
  EXPECT_EQ(s.den, mul(x1(), x1()));
  EXPECT_EQ(s.degree(), 2);
}

TEST(RatAdd, DomainMismatchRejected) {
  const RationalFn<double> f(one(), x1(), {Interval(1, 2)});
  const RationalFn<double> g(one(), x1(), {Interval(1, 3)});
  EXPECT_THROW(rat_add(f, g), PreconditionError);
}

TEST(RatMul, ExamplesAndScale) {
  const RationalFn<double> inv(one(), x1(), {Interval(1, 2)});
  const auto p = rat_mul(inv, poly_rat(x1(), Interval(1, 2)));
  EXPECT_EQ(p.num, x1());
  EXPECT_EQ(p.den, x1());
  EXPECT_TRUE(rat_scale(inv, 0.0).num.is_zero());
}

TEST(RatCompose, IdentityReturnsOperand) {
  std::mt19937_64 rng(3);
  const RationalFn<double> f(random_poly(rng, 2, 3, 4), P::constant(2, 1.0) + random_poly(rng, 2, 2, 2).scaled(0.1),
                             {Interval(-1, 1), Interval(-1, 1)});
  const RationalFn<double> id(x1(), one(), {Interval(-1, 1)});
  const auto g = rat_compose_uni(id, f);
  EXPECT_EQ(g.num, f.num);
  EXPECT_EQ(g.den, f.den);
}

TEST(RatCompose, SquareOfIdentity) {
  const RationalFn<double> sq(mul(x1(), x1()), one(), {Interval(-1, 1)});
  const auto g = rat_compose_uni(sq, poly_rat(x1()));
  EXPECT_EQ(g.num, mul(x1(), x1()));
  EXPECT_EQ(g.den, one());
}

TEST(RatCompose, DegreeBound) {
  std::mt19937_64 rng(11);
  const RationalFn<double> R(random_poly(rng, 1, 3, 4) + P(1, {{1.0, {3}}}), one() + P(1, {{0.5, {2}}}), {Interval(-1, 1)});
  const RationalFn<double> f(P(1, {{1.0, {4}}, {0.3, {1}}}), one() + P(1, {{0.2, {4}}}), {Interval(-1, 1)});
  ASSERT_EQ(R.degree(), 3);
  ASSERT_EQ(f.degree(), 4);
  EXPECT_LE(rat_compose_uni(R, f).degree(), 12);
}

TEST(RationalProperties, PointwiseArithmetic) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + trial % 2;
    std::vector<Interval> dom(static_cast<std::size_t>(dim), Interval(-1, 1));
    const RationalFn<double> f(random_poly(rng, dim, 4, 4), P::constant(dim, 1.5) + random_poly(rng, dim, 3, 3), dom);
    const RationalFn<double> g(random_poly(rng, dim, 4, 4), P::constant(dim, 1.5) + random_poly(rng, dim, 3, 3), dom);
    const auto s = rat_add(f, g), m = rat_mul(f, g);
    EXPECT_LE(s.degree(), f.degree() + g.degree());
    const RationalFn<double> R(random_poly(rng, 1, 3, 3), P::constant(1, 2.0) + random_poly(rng, 1, 2, 2), {Interval(-1, 1)});
    const auto c = rat_compose_uni(R, f);
    EXPECT_LE(c.degree(), R.degree() * f.degree());
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x(static_cast<std::size_t>(dim));
      for (auto& v : x) v = uniform(rng, -1, 1);
      const double fq = f.den.eval(x), gq = g.den.eval(x);
      if (std::abs(fq) < 1e-9 || std::abs(gq) < 1e-9) continue;
      const double fv = f.eval(x), gv = g.eval(x);
      EXPECT_NEAR(s.eval(x), fv + gv, 1e-9 * (1 + std::abs(fv) + std::abs(gv)));
      EXPECT_NEAR(m.eval(x), fv * gv, 1e-9 * (1 + std::abs(fv * gv)));
      const double rq = R.den(fv);
      if (std::abs(rq) < 1e-9 || std::abs(c.den.eval(x)) < 1e-9) continue;
      EXPECT_NEAR(c.eval(x), R(fv), 1e-8 * (1 + std::abs(R(fv))));
    }
  }
}

TEST(SignChanges, Examples) {
  EXPECT_EQ(sign_changes(UniPoly<double>({-1.0, 0.0, 1.0})), 1);
  EXPECT_EQ(sign_changes(UniPoly<double>({0.0, 1.0, 0.0, 1.0})), 0);
  FactoredUniPoly f{1.0, {1.0, 2.0, 3.0}};
  const auto p = f.expand();
  EXPECT_EQ(p.coeffs(), (std::vector<double>{-6.0, 11.0, -6.0, 1.0}));
  EXPECT_EQ(sign_changes(p), 3);
}

TEST(SignChanges, BoundsPositiveRootsProperty) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    FactoredUniPoly f{uniform(rng, 0.5, 2.0), {}};
    const int pos = 1 + static_cast<int>(rng() % 5), neg = static_cast<int>(rng() % 4);
    for (int i = 0; i < pos; ++i) f.roots.push_back(uniform(rng, 0.1, 3.0));
    for (int i = 0; i < neg; ++i) f.roots.push_back(-uniform(rng, 0.1, 3.0));
    EXPECT_GE(sign_changes(f.expand()), pos);
  }
}

TEST(FactoredUniPoly, ExpansionLimit) {
  FactoredUniPoly f{1.0, std::vector<double>(65, -0.5)};
  EXPECT_THROW(f.expand(), PreconditionError);
}

TEST(Crossings, Examples) {
  const Interval unit(0, 1);
  const RationalFn<double> zero(P(1), one(), {unit});
  EXPECT_EQ(crossings_at_level(zero, 0.5, unit, 1001).crossings, 0);
  const RationalFn<double> id(x1(), one(), {unit});
  const auto rep = crossings_at_level(id, 0.5, unit, 1001);
  EXPECT_EQ(rep.crossings, 1);
  ASSERT_EQ(rep.roots.size(), 1u);
  EXPECT_NEAR(rep.roots[0], 0.5, 1e-12);
  EXPECT_THROW(crossings_at_level(id, 0.5, unit, 2), PreconditionError);
}

TEST(Crossings, TangencyIsNotACrossing) {
  const Interval unit(0, 1);
  // (x - 1/2)^2 + 1/2 touches level 1/2 at x = 1/2 without crossing
  const P p(1, {{0.75, {0}}, {-1.0, {1}}, {1.0, {2}}});
  const RationalFn<double> g(p, one(), {unit});
  EXPECT_EQ(crossings_at_level(g, 0.5, unit, 1000).crossings, 0);
}

TEST(Crossings, DescartesChainOnRandomRationals) {
  std::mt19937_64 rng(29);
  const Interval unit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const P num = random_poly(rng, 1, 20, 4);
    const P den = P::constant(1, 2.0) + random_poly(rng, 1, 20, 3).scaled(0.3);
    const RationalFn<double> g(num, den, {unit});
    const auto rep = crossings_at_level(g, 0.5, unit, 20001);
    EXPECT_LE(rep.crossings, rep.descartes_bound);
    EXPECT_LE(static_cast<std::size_t>(rep.descartes_bound), g.term_count());
  }
}

TEST(Json, RationalRoundTrip) {
  const RationalFn<double> f(P(2, {{1.5, {1, 0}}, {-2.0, {0, 3}}}), P(2, {{1.0, {0, 0}}, {0.25, {2, 2}}}),
                             {Interval(0, 1), Interval(0, 1)});
  const auto j = to_json(f);
  EXPECT_EQ(j["dim"], 2);
  const auto g = rational_from_json(j);
  EXPECT_EQ(g.num, f.num);
  EXPECT_EQ(g.den, f.den);
  EXPECT_EQ(g.domain, f.domain);
  const auto u = unipoly_from_json(to_json(UniPoly<double>({1.0, 0.0, 3.0})));
  EXPECT_EQ(u.coeffs(), (std::vector<double>{1.0, 0.0, 3.0}));
}

TEST(Extended, DowncastRescalesByPowerOfTwo) {
  ScopedPrecision prec(128);
  using PE = SparsePoly<Extended>;
  const RationalFn<Extended> f(PE(1, {{Extended("1e400"), {1}}}), PE(1, {{Extended("2e400"), {0}}}), {Interval(-1, 1)});
  const auto d = downcast_rescaled(f);
  EXPECT_NEAR(d(0.5), 0.25, 1e-15);
}
