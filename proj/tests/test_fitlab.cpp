#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ratrelu/fitlab.hpp"

using namespace ratrelu;

namespace {
const Grid kGrid(Interval(-1, 1), 1001);
}

TEST(PolyFit, ExactQuadratic) {
  const auto f = fit_poly_ls([](double x) { return x * x - 0.5 * x + 0.25; }, 2, kGrid);
  EXPECT_LE(f.residual, 1e-10);
  EXPECT_NEAR(f.poly.coeff(2), 1.0, 1e-10);
  EXPECT_TRUE(f.warning.empty());
}

TEST(PolyFit, DegreeZeroIsMean) {
  const auto y = sample_target([](double x) { return std::exp(x); }, kGrid);
  const auto f = fit_poly_ls(y, 0, kGrid);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  EXPECT_NEAR(f.poly.coeff(0), mean, 1e-13);
}

TEST(PolyFit, ReluLeavesResidual) {
  const auto f = fit_poly_ls([](double x) { return std::max(0.0, x); }, 9, kGrid);
  EXPECT_GT(f.residual, 1e-3);
  EXPECT_LT(f.residual, 0.05);
}

TEST(PolyFit, ResidualNonIncreasingInDegree) {
  const auto y = sample_target(target_by_name("spike").f, Grid(Interval(0, 1), 1001));
  double prev = INFINITY;
  for (int d = 0; d <= 12; ++d) {
    const auto f = fit_poly_ls(y, d, Grid(Interval(0, 1), 1001));
    EXPECT_LE(f.residual, prev * (1 + 1e-9)) << "degree " << d;
    prev = f.residual;
  }
}

TEST(RationalFit, RepresentableTarget) {
  auto t = [](double x) { return (1.0 + 0.5 * x * x) / (1.0 + 0.3 * x + 0.2 * x * x); };
  const auto f = fit_rational_ls(t, 2, kGrid, 30);
  EXPECT_LE(f.residual, 1e-6);
  EXPECT_GT(f.min_den, 0.0);
}

TEST(RationalFit, FrozenDenominatorIsPolynomialFit) {
  const auto y = sample_target(target_by_name("relu").f, kGrid);
  const auto p = fit_poly_ls(y, 9, kGrid);
  const auto r = fit_rational_ls(y, 9, kGrid, 10, true);
  EXPECT_EQ(r.fn.den.term_count(), 1u);
  for (int k = 0; k <= 9; ++k) {
    const std::vector<Exponent> e{static_cast<Exponent>(k)};
    double c = 0.0;
    for (const auto& t : r.fn.num.terms()) {
      if (t.exps == e) c = t.coef;
    }
    EXPECT_EQ(c, p.poly.coeff(k));
  }
  EXPECT_EQ(r.residual, p.residual);
}

TEST(RationalFit, SpikeBeatsPolynomial) {
  const auto t = target_by_name("spike");
  const Grid g(t.interval, 1001);
  const auto r = fit_rational_ls(t.f, 9, g, 30);
  const auto p = fit_poly_ls(t.f, 9, g);
  EXPECT_GT(r.min_den, 0.0);
  EXPECT_LT(r.residual, p.residual);
}

TEST(NetFit, SingleRelu) {
  const auto y = sample_target([](double x) { return std::max(0.0, x); }, kGrid);
  const auto f = fit_relu_net(y, kGrid, {3, 3}, 10000, 1);
  EXPECT_LE(f.loss, 1e-4);
  for (std::size_t i = 1; i < f.loss_history.size(); ++i) ASSERT_LE(f.loss_history[i], f.loss_history[i - 1]);
  EXPECT_EQ(f.net.activation_depth(), 2);
  EXPECT_EQ(f.net.activation_width(), 3);
}

TEST(NetFit, BitReproducible) {
  const auto y = sample_target(target_by_name("triangle").f, Grid(Interval(0, 1), 401));
  const auto a = fit_relu_net(y, Grid(Interval(0, 1), 401), {3, 3}, 500, 42);
  const auto b = fit_relu_net(y, Grid(Interval(0, 1), 401), {3, 3}, 500, 42);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(net_to_json(a.net).dump(), net_to_json(b.net).dump());
}

TEST(Targets, UnknownNameRejected) { EXPECT_THROW(target_by_name("nope"), PreconditionError); }
