#include <gtest/gtest.h>

#include <cmath>

#include "ratrelu/newman.hpp"

using namespace ratrelu;

TEST(NewmanPoly, ValueAtZero) {
  const auto n5 = newman_poly(5);
  EXPECT_EQ(n5.roots.size(), 4u);
  EXPECT_NEAR(n5(0.0), 0.01142289099346694297, 1e-16);
  EXPECT_GT(n5(1.0), 1.0);
  EXPECT_NEAR(n5(1.0), 3.400437479139592411, 1e-14);
  EXPECT_THROW(newman_poly(4), PreconditionError);
}

TEST(NewmanPoly, MonotoneOnUnitInterval) {
  const auto n = newman_poly(9);
  Grid g(Interval(0, 1), 1001);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(n(g[i - 1]), n(g[i]));
}

TEST(NewmanPoly, ExpansionMatchesFactoredForm) {
  ScopedPrecision prec(128);
  const auto e = newman_poly_expanded<Extended>(13);
  const auto f = newman_poly(13);
  for (double x : {-1.0, -0.3, 0.0, 0.4, 1.0}) EXPECT_NEAR(static_cast<double>(e(Extended(x))), f(x), 1e-13);
}

TEST(NewmanPoly, EvenPartPositiveProperty) {
  for (int r : {5, 9, 16, 25, 36, 64}) {
    const auto n = newman_poly(r);
    Grid g(Interval(-3, 3), 6001);
    for (double x : g) EXPECT_GT(n(x) + n(-x), 0.0) << "r=" << r << " x=" << x;
  }
}

TEST(NewmanAbs, ZeroAtOrigin) {
  EXPECT_EQ(newman_abs_eval(25, 0.0), 0.0);
  EXPECT_EQ(newman_abs<double>(9)(0.0), 0.0);
}

TEST(NewmanAbs, ErrorBoundOnGrid) {
  Grid g(Interval(-1, 1), 200001);
  for (int r : {9, 16, 25, 36}) {
    const auto rep = sup_error([](double x) { return std::abs(x); }, [r](double x) { return newman_abs_eval(r, x); }, g);
    EXPECT_LE(rep.sup_err, 3.0 * std::exp(-std::sqrt(r))) << r;
  }
  const auto rep25 = sup_error([](double x) { return std::abs(x); }, [](double x) { return newman_abs_eval(25, x); }, g);
  EXPECT_LE(rep25.sup_err, 0.0202);
}

TEST(NewmanAbs, ScaledFormBound) {
  for (double b : {1.0, 2.0, 5.0}) {
    Grid g(Interval(-b, b), 200001);
    const auto rep =
        sup_error([](double x) { return std::abs(x); }, [b](double x) { return b * newman_abs_eval(16, x / b); }, g);
    EXPECT_LE(rep.sup_err, 3.0 * b * std::exp(-4.0));
  }
}

TEST(NewmanAbs, ExplicitAgreesWithFactored) {
  ScopedPrecision prec(128);
  const auto a = newman_abs<Extended>(25);
  Grid g(Interval(-1, 1), 401);
  for (double x : g) EXPECT_NEAR(static_cast<double>(a.eval(std::vector<Extended>{Extended(x)})), newman_abs_eval(25, x), 1e-14);
}

TEST(NewmanRelu, ValuesAtOrigin) {
  const NewmanParams p(25, 2.0);
  NewmanRelu R(p);
  EXPECT_EQ(R.tilde(0.0), 0.0);
  EXPECT_DOUBLE_EQ(R(0.0), 2.0 * p.eps_rb);
  const auto pair = newman_relu<double>(25, 2.0);
  EXPECT_EQ(pair.tilde(0.0), 0.0);
  EXPECT_NEAR(pair.clipped(0.0), 2.0 * p.eps_rb, 1e-15);
}

TEST(NewmanRelu, ContractsOnGrid) {
  for (int r : {9, 16, 25, 36}) {
    for (double b : {1.0, 2.0}) {
      const NewmanParams p(r, b);
      NewmanRelu R(p);
      Grid g(Interval(-b, b), 200001);
      auto relu = [](double x) { return std::max(x, 0.0); };
      EXPECT_LE(sup_error(relu, [&](double x) { return R.tilde(x); }, g).sup_err, b * p.eps_rb) << r << " " << b;
      EXPECT_LE(sup_error(relu, R, g).sup_err, 3 * b * p.eps_rb) << r << " " << b;
      for (double x : g) {
        EXPECT_GE(R(x), 0.0);
        EXPECT_LE(R(x), b);
      }
    }
  }
}

TEST(NewmanRelu, Degree25Example) {
  NewmanRelu R(NewmanParams(25, 1.0));
  Grid g(Interval(-1, 1), 200001);
  EXPECT_LE(sup_error([](double x) { return std::max(x, 0.0); }, R, g).sup_err, 0.0304);
}

TEST(NewmanRelu, ExplicitAgreesWithFactored) {
  ScopedPrecision prec(160);
  for (int r : {9, 15, 25}) {
    const auto pair = newman_relu<Extended>(r, 1.0);
    NewmanRelu R(NewmanParams(r, 1.0));
    EXPECT_EQ(pair.clipped.degree(), r);
    EXPECT_EQ(pair.tilde.degree(), r);
    Grid g(Interval(-1, 1), 201);
    for (double x : g) {
      EXPECT_NEAR(static_cast<double>(pair.clipped.eval(std::vector<Extended>{Extended(x)})), R(x), 1e-14);
      EXPECT_NEAR(static_cast<double>(pair.tilde.eval(std::vector<Extended>{Extended(x)})), R.tilde(x), 1e-14);
    }
  }
}

TEST(NewmanRelu, DenominatorNormalized) {
  const auto pair = newman_relu<double>(9, 1.0);
  EXPECT_EQ(pair.clipped.den(0.0), 1.0);
  for (std::size_t i = 0; i < pair.clipped.den.term_count(); ++i) EXPECT_GT(pair.clipped.den.coef(i), 0.0);
}

TEST(NewmanThreshold, SymmetryAndRange) {
  EXPECT_EQ(newman_threshold_eval(13, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(newman_threshold<double>(13)(0.0), 0.5);
  const double v = newman_threshold_eval(9, 1.0);
  EXPECT_GT(v, 0.5);
  EXPECT_LE(v, 1.0);
}

TEST(NewmanThreshold, StepErrorAwayFromOrigin) {
  Grid g(Interval(-1, 1), 200001);
  double worst = 0.0;
  for (double x : g) {
    if (std::abs(x) < 0.05) continue;
    worst = std::max(worst, std::abs(newman_threshold_eval(13, x) - (x > 0 ? 1.0 : 0.0)));
  }
  EXPECT_LE(worst, 0.05);
  EXPECT_NEAR(worst, 1.1518910637845e-3, 1e-9);
}

TEST(RequiredDegree, Examples) {
  // 4.5 exp(-sqrt 15) = 0.0936 <= 0.1 < 4.5 exp(-sqrt 14) = 0.1067
  EXPECT_EQ(required_degree(0.1, 1.0), 15);
  EXPECT_EQ(required_degree(1.0, 1.0), 5);
  EXPECT_THROW(required_degree(0.0, 1.0), PreconditionError);
}

TEST(RequiredDegree, DefiningPropertyAndMinimality) {
  for (double eps : {1.0, 0.5, 0.1, 0.05, 0.01, 1e-3, 1e-5, 1.0 / 256}) {
    for (double b : {1.0, 2.0, 10.0}) {
      const int r = required_degree(eps, b);
      EXPECT_GE(r, 5);
      EXPECT_LE(4.5 * b * std::exp(-std::sqrt(r)), eps);
      if (r > 5) {
        EXPECT_GT(4.5 * b * std::exp(-std::sqrt(r - 1)), eps);
      }
      const int ru = required_degree(eps, b, false);
      EXPECT_LE(1.5 * b * std::exp(-std::sqrt(ru)), eps);
      EXPECT_LE(ru, r);
    }
  }
}
