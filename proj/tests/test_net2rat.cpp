#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ratrelu/net2rat.hpp"

using namespace ratrelu;

namespace {
ReluNet single_relu() {
  Eigen::MatrixXd w(1, 1);
  w << 1.0;
  return ReluNet(1, {Layer::dense(w, Eigen::VectorXd::Zero(1), Activation::ReLU)});
}

double grid_gap(const ReluNet& a, const RationalNet& b, std::size_t n) {
  Grid g(Interval(-1, 1), n);
  return sup_error([&](double x) { return a(x); }, [&](double x) { return b(x); }, g).sup_err;
}
}  // namespace

TEST(Substitution, SingleNodeAtTenthUsesFifteen) {
  const auto rn = substitute_activation(single_relu(), 0.1);
  EXPECT_EQ(rn.r(), 15);
  EXPECT_EQ(rn.l, 1);
  EXPECT_LE(grid_gap(single_relu(), rn, kCertificationGridN), 0.1);
}

TEST(Substitution, ZeroNetGapIsZero) {
  const ReluNet z = ReluNet::zero(2);
  const auto res = net_to_rational(z, 0.1, 2500);
  EXPECT_EQ(res.report.sup_err, 0.0);
  EXPECT_TRUE(res.certified);
}

TEST(Substitution, RandomConstrainedTwoLayer) {
  std::mt19937_64 rng(7);
  const auto net = random_constrained_net(1, {2, 1}, rng);
  const auto rn = substitute_activation(net, 0.05);
  EXPECT_LE(grid_gap(net, rn, kCertificationGridN), 0.05);
}

TEST(Substitution, RefusesUnnormalizedNet) {
  const ReluNet tri = build_triangle(1);
  try {
    substitute_activation(tri, 0.1);
    FAIL() << "expected HypothesisError";
  } catch (const HypothesisError& e) {
    EXPECT_NE(std::string(e.what()).find("layer"), std::string::npos);
  }
}

TEST(Substitution, ActivationInputsStayInUnitInterval) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = random_constrained_net(2, {3, 3, 1}, rng);
    const auto rn = substitute_activation(net, 0.1);
    EXPECT_LE(max_activation_input(rn, make_box_samples(2, Interval(-1, 1), 2000)), 1.0 + 1e-12);
  }
}

TEST(Substitution, ErrorWithinBudgetAcrossDepths) {
  std::mt19937_64 rng(3);
  for (int depth = 1; depth <= 4; ++depth) {
    std::vector<int> widths(static_cast<std::size_t>(depth), 3);
    widths.back() = 1;
    const auto net = random_constrained_net(1, widths, rng);
    for (double eps : {0.1, 0.01}) {
      const auto rn = substitute_activation(net, eps);
      EXPECT_LE(grid_gap(net, rn, 20001), eps) << "depth " << depth;
    }
  }
}

TEST(Amplified, TrianglePowerStaysWithinBudget) {
  const ReluNet tri = build_triangle(3);
  const auto rn = substitute_activation_amplified(tri, 1.0 / 64, 2.0);
  const auto s = make_box_samples(1, Interval(-1, 1), 4001);
  EXPECT_LE(max_activation_input(rn, s), 2.0);
  Grid g(Interval(-1, 1), 20001);
  const double gap = sup_error([&](double x) { return tri(x); }, [&](double x) { return rn(x); }, g).sup_err;
  EXPECT_LE(gap, 1.0 / 64);
}

TEST(Collapse, DegreeWithinBoundDepthTwoWidthTwo) {
  std::mt19937_64 rng(5);
  const auto net = random_constrained_net(1, {2, 1}, rng);
  const auto rn = substitute_with(net, NewmanParams(9, 1.0));
  const auto c = collapse(rn);
  EXPECT_LE(c.audit.actual, 324);
  EXPECT_EQ(c.audit.bound, 324);
  EXPECT_TRUE(c.audit.ok());
}

TEST(Collapse, MatchesFactoredNetwork) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 3; ++trial) {
    const auto net = random_constrained_net(1, {2, 1}, rng);
    const auto rn = substitute_with(net, NewmanParams(9, 1.0));
    const auto c = collapse(rn);
    const auto s = make_box_samples(1, Interval(-1, 1), 1001);
    const auto got = eval_rational_extended(c.fn, s);
    const auto want = rn.net.eval_batch(s.coords);
    for (std::size_t i = 0; i < s.count(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9 * (1 + std::abs(want[i])));
  }
}

TEST(Collapse, TwoDimensionalMatchesFactoredNetwork) {
  std::mt19937_64 rng(8);
  const auto net = random_constrained_net(2, {2, 1}, rng);
  const auto rn = substitute_with(net, NewmanParams(5, 1.0));
  const auto c = collapse(rn);
  EXPECT_TRUE(c.audit.ok());
  const auto s = make_box_samples(2, Interval(-1, 1), 400);
  const auto got = eval_rational_extended(c.fn, s);
  const auto want = rn.net.eval_batch(s.coords);
  for (std::size_t i = 0; i < s.count(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9 * (1 + std::abs(want[i])));
}

TEST(Collapse, RefusesReluLayers) { EXPECT_THROW(collapse(RationalNet{single_relu(), {}, 0, 0, 1}), PreconditionError); }

TEST(Collapse, RefusesLargeDegree) {
  const auto rn = substitute_with(single_relu(), NewmanParams(100, 1.0));
  EXPECT_THROW(collapse(rn), PreconditionError);
}

TEST(Collapse, TermCapReportsLayer) {
  std::mt19937_64 rng(2);
  const auto net = random_constrained_net(2, {3, 3}, rng);
  const auto rn = substitute_with(net, NewmanParams(15, 1.0));
  ArithmeticLimits lim;
  lim.max_terms = 200;
  try {
    collapse(rn, lim);
    FAIL() << "expected BlowupError";
  } catch (const BlowupError& e) {
    EXPECT_NE(std::string(e.what()).find("layer"), std::string::npos);
  }
}

TEST(Pipeline, CertifiesSmallNet) {
  std::mt19937_64 rng(13);
  const auto net = random_constrained_net(1, {2, 1}, rng);
  const auto res = net_to_rational(net, 0.1, 2001);
  EXPECT_TRUE(res.certified);
  EXPECT_LE(res.report.sup_err, 0.1);
  EXPECT_TRUE(res.collapsed.audit.ok());
  EXPECT_GT(res.theorem_shape, 0.0);
  EXPECT_GE(res.collapsed.precision_bits, 128u);
  EXPECT_EQ(res.double_report.grid_n, res.report.grid_n);
}

TEST(Collapse, PrecisionGrowsWithCancellation) {
  std::mt19937_64 rng(21);
  const auto net = random_constrained_net(1, {2, 1}, rng);
  const auto rn = substitute_with(net, NewmanParams(9, 1.0));
  const auto c = collapse(rn, {}, 64);
  EXPECT_GT(c.precision_bits, 64u);
}

TEST(Pipeline, DegreeAuditCsv) {
  DegreeAudit a{9, 2, 2, false, 324, 300};
  EXPECT_EQ(DegreeAudit::csv_header(), "r,m,l,bound,actual,ok");
  EXPECT_EQ(a.csv_row(), "9,2,2,324,300,1");
}
