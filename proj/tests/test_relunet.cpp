#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ratrelu/relunet.hpp"

using namespace ratrelu;

namespace {
ReluNet single_relu() {
  Eigen::MatrixXd w(1, 1);
  w << 1.0;
  return ReluNet(1, {Layer::dense(w, Eigen::VectorXd::Zero(1), Activation::ReLU)});
}

ReluNet three_node_tent() {
  Eigen::MatrixXd w1(3, 1);
  w1 << 1, 1, 1;
  Eigen::VectorXd b1(3);
  b1 << 0, -0.5, -1;
  Eigen::MatrixXd w2(1, 3);
  w2 << 2, -4, 2;
  return ReluNet(1, {Layer::dense(w1, b1, Activation::ReLU), Layer::dense(w2, Eigen::VectorXd::Zero(1), Activation::Identity)});
}

// Number of pieces seen by a slope-change scan: runs of nonzero second differences.
std::size_t scan_pieces(const std::vector<double>& v, double tol) {
  std::size_t runs = 0;
  bool in_run = false;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const bool kink = std::abs(v[i + 1] - 2 * v[i] + v[i - 1]) > tol;
    if (kink && !in_run) ++runs;
    in_run = kink;
  }
  return runs + 1;
}
}  // namespace

TEST(NetEval, SingleNode) {
  const auto n = single_relu();
  EXPECT_EQ(n(-2.0), 0.0);
  EXPECT_EQ(n(0.3), 0.3);
  EXPECT_THROW(n.eval(std::vector<double>{1.0, 2.0}), PreconditionError);
}

TEST(NetEval, ThreeNodeTent) {
  EXPECT_EQ(three_node_tent()(0.5), 1.0);
  EXPECT_EQ(three_node_tent()(0.25), 0.5);
}

TEST(NetEval, BatchMatchesPointwise) {
  std::mt19937_64 rng(5);
  const auto net = random_relu_net(2, {3, 3}, rng);
  const auto s = make_box_samples(2, Interval(-1, 1), 900);
  const auto batch = net.eval_batch(s.coords);
  for (std::size_t i = 0; i < s.count(); ++i) EXPECT_EQ(batch[i], net.eval(s.point(i)));
}

TEST(NetEval, RejectsInconsistentLayers) {
  Eigen::MatrixXd w(1, 2);
  w << 1, 1;
  EXPECT_THROW(ReluNet(1, {Layer::dense(w, Eigen::VectorXd::Zero(1), Activation::ReLU)}), PreconditionError);
}

TEST(CheckConstraints, Examples) {
  EXPECT_TRUE(check_constraints(ReluNet::zero(2)).ok);
  Eigen::MatrixXd w(1, 2);
  w << 0.6, 0.5;
  const auto bad = check_constraints(ReluNet(2, {Layer::dense(w, Eigen::VectorXd::Zero(1), Activation::ReLU)}));
  EXPECT_FALSE(bad.ok);
  EXPECT_NEAR(bad.nodes[0].norm, 1.1, 1e-15);
  EXPECT_NE(bad.violations().find("layer 0 node 0"), std::string::npos);
  Eigen::MatrixXd w1(1, 1);
  w1 << 0.5;
  Eigen::VectorXd b(1);
  b << 0.5;
  EXPECT_TRUE(check_constraints(ReluNet(1, {Layer::dense(w1, b, Activation::ReLU)})).ok);
}

TEST(Triangle, DefinitionValues) {
  const auto d = build_triangle(1);
  EXPECT_EQ(d(0.25), 0.5);
  EXPECT_EQ(d(0.5), 1.0);
  EXPECT_EQ(d(0.75), 0.5);
  EXPECT_EQ(d(-0.3), 0.0);
  EXPECT_EQ(d(1.4), 0.0);
  EXPECT_EQ(build_triangle(2)(0.25), 1.0);
  EXPECT_THROW(build_triangle(0), PreconditionError);
}

TEST(Triangle, ShapeAndConstraintAudit) {
  for (int k = 1; k <= 6; ++k) {
    const auto d = build_triangle(k);
    EXPECT_EQ(d.depth(), 2 * k);
    EXPECT_EQ(d.activation_depth(), 2 * k);
    EXPECT_LE(d.width(), 2);
    EXPECT_FALSE(check_constraints(d).ok);
  }
}

TEST(Triangle, DyadicValuesExact) {
  for (int k = 1; k <= 10; ++k) {
    const auto d = build_triangle(k);
    const int n = 1 << k;
    for (int j = 0; j <= n; ++j) {
      const double v = d(static_cast<double>(j) / n);
      EXPECT_EQ(v, j % 2 == 0 ? 0.0 : 1.0) << "k=" << k << " j=" << j;
    }
  }
}

TEST(Triangle, CrossesHalfTwoToTheKTimes) {
  for (int k = 1; k <= 6; ++k) {
    const auto d = build_triangle(k);
    Grid g(Interval(0, 1), (1u << 14) + 3);
    const auto v = d.eval_grid(g);
    int crossings = 0;
    for (std::size_t i = 1; i < v.size(); ++i) crossings += (v[i - 1] - 0.5) * (v[i] - 0.5) < 0;
    EXPECT_EQ(crossings, 1 << k);
  }
}

TEST(Spike, Values) {
  EXPECT_EQ(spike(0.5), 2.0);
  EXPECT_EQ(spike(0.1), 0.0);
  EXPECT_EQ(spike(1.0), 1.0);
  EXPECT_EQ(spike(0.25), 4.0);
}

TEST(Clip01, Examples) {
  Eigen::MatrixXd w(1, 1);
  w << 1.0;
  const ReluNet id(1, {Layer::dense(w, Eigen::VectorXd::Zero(1), Activation::Identity)});
  const auto c = clip01(id);
  EXPECT_EQ(c(-0.5), 0.0);
  EXPECT_EQ(c(0.5), 0.5);
  EXPECT_EQ(c(1.7), 1.0);
  const auto cr = clip01(single_relu());
  EXPECT_EQ(cr(1.7), 1.0);
  EXPECT_EQ(cr(0.2), 0.2);
}

TEST(Clip01, RangeProperty) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto c = clip01(random_relu_net(1, {3, 3}, rng, 4.0));
    // sigma(v) - sigma(v - 1) rounds v - 1 for |v| > 2, so the upper end is 1 up to one ulp of v.
    for (double v : c.eval_grid(Grid(Interval(-3, 3), 2001))) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0 + 1e-13);
    }
  }
}

TEST(EnumeratePieces, SingleRelu) {
  const auto pl = enumerate_pieces(single_relu(), Interval(-1, 1));
  EXPECT_EQ(pl.pieces(), 2u);
  ASSERT_EQ(pl.breakpoints().size(), 1u);
  EXPECT_EQ(pl.breakpoints()[0], 0.0);
}

TEST(EnumeratePieces, Tent) {
  const auto pl = enumerate_pieces(build_triangle(1), Interval(0, 1));
  EXPECT_EQ(pl.pieces(), 2u);
  EXPECT_DOUBLE_EQ(pl.breakpoints().at(0), 0.5);
}

TEST(EnumeratePieces, TrianglePowersMatchScan) {
  Grid g(Interval(0, 1), (1u << 20) + 1);
  for (int k = 1; k <= 6; ++k) {
    const auto d = build_triangle(k);
    const auto pl = enumerate_pieces(d, Interval(0, 1));
    EXPECT_EQ(pl.pieces(), static_cast<std::size_t>(1) << k);
    EXPECT_LE(pl.pieces(), static_cast<std::size_t>(std::pow(4.0, 2 * k)));
    EXPECT_EQ(pl.pieces(), scan_pieces(d.eval_grid(g), 1e-9));
  }
}

TEST(EnumeratePieces, ReproducesEvaluationProperty) {
  std::mt19937_64 rng(17);
  Grid g(Interval(-1, 1), 20001);
  for (int t = 0; t < 30; ++t) {
    const int l = 1 + t % 3;
    std::vector<int> widths(static_cast<std::size_t>(l), 2 + t % 2);
    const auto net = random_relu_net(1, widths, rng);
    const auto pl = enumerate_pieces(net, Interval(-1, 1));
    const auto vals = net.eval_grid(g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(pl(g[i]), vals[i], 1e-9);
    const int m = net.activation_width();
    EXPECT_LE(pl.pieces(), static_cast<std::size_t>(std::pow(2.0 * m, l)));
  }
}

TEST(EnumeratePieces, CapRaisesBlowup) { EXPECT_THROW(enumerate_pieces(build_triangle(8), Interval(0, 1), 100), BlowupError); }

TEST(NetBuilder, CompiledMatchesDagEvaluation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const bool nonneg = trial % 2 == 0;
    const int d = 1 + trial % 3;
    NetBuilder nb(d, nonneg);
    std::vector<Lin> pool;
    for (int k = 0; k < d; ++k) pool.push_back(nb.input(k));
    for (int i = 0; i < 25; ++i) {
      Lin z(uniform(rng, -1, 1));
      for (int j = 0; j < 3; ++j) z = z + uniform(rng, -1, 1) * pool[rng() % pool.size()];
      pool.push_back(nb.relu(z));
    }
    Lin out = 0.3 * pool.back() - 0.7 * pool[pool.size() / 2] + 0.25 * pool[0] + 0.1;
    const auto net = nb.compile(out);
    const auto s = make_box_samples(d, Interval(nonneg ? 0.0 : -1.0, 1.0), 400);
    for (std::size_t i = 0; i < s.count(); ++i) EXPECT_NEAR(net.eval(s.point(i)), nb.evaluate(out, s.point(i)), 1e-12);
  }
}

TEST(NetBuilder, ReluTerminalNeedsNoIdentityLayer) {
  NetBuilder nb(1);
  const Lin a = nb.relu(nb.input(0));
  const auto net = nb.compile(nb.relu(a - 0.5));
  EXPECT_FALSE(net.has_identity_output());
  EXPECT_EQ(net.depth(), 2);
}

TEST(Composition, SerialParallelAffine) {
  const auto t = build_triangle(1);
  const auto tt = serial(t, t);
  const auto d2 = build_triangle(2);
  const auto both = parallel({t, d2});
  const auto sum = affine_join({t, d2}, {1.0, -2.0}, 0.5);
  Grid g(Interval(-0.5, 1.5), 1001);
  for (double x : g) {
    EXPECT_NEAR(tt(x), d2(x), 1e-15);
    const auto v = both.eval_all(&x);
    EXPECT_NEAR(v[0], t(x), 1e-15);
    EXPECT_NEAR(v[1], d2(x), 1e-15);
    EXPECT_NEAR(sum(x), t(x) - 2 * d2(x) + 0.5, 1e-14);
  }
}

TEST(Json, NetworkRoundTrip) {
  std::mt19937_64 rng(37);
  const auto net = random_relu_net(2, {3, 2}, rng);
  const auto back = net_from_json(json::parse(net_to_json(net).dump()));
  const auto s = make_box_samples(2, Interval(-1, 1), 100);
  for (std::size_t i = 0; i < s.count(); ++i) EXPECT_EQ(back.eval(s.point(i)), net.eval(s.point(i)));
  const auto j = net_to_json(net);
  EXPECT_EQ(j["layers"][0]["act"], "relu");
  EXPECT_EQ(j["layers"][2]["act"], "id");
}

TEST(Json, RationalActivationRoundTrip) {
  ReluNet net = single_relu();
  net.mutable_layers()[0].act = Activation::Rational;
  net.mutable_layers()[0].rational = RationalActivation::from_newman(NewmanParams(9, 1.0));
  const auto back = net_from_json(net_to_json(net));
  for (double x : {-1.0, -0.2, 0.0, 0.5, 1.0}) EXPECT_EQ(back(x), net(x));
}

TEST(Json, UnknownActivationRejected) {
  const auto j = json::parse(R"({"in_dim":1,"layers":[{"w":[[1]],"b":[0],"act":"tanh"}]})");
  EXPECT_THROW(net_from_json(j), PreconditionError);
}
