#pragma once

// Least-squares fits of polynomials, rationals and small ReLU networks to
// univariate targets. Used for the comparison figures and the shallow
// network sweep; nothing here carries an approximation guarantee.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ratrelu/algebra.hpp"
#include "ratrelu/numcore.hpp"
#include "ratrelu/relunet.hpp"

namespace ratrelu {

using Target = std::function<double(double)>;

struct FitConfig {
  int degree = 9;
  std::vector<int> widths{3, 3};
  Grid grid{Interval(-1.0, 1.0), 1001};
  int iterations = 10000;
  std::uint64_t seed = 1;
  double learning_rate = 0.05;
  bool freeze_denominator = false;
};

inline std::vector<double> sample_target(const Target& f, const Grid& grid) {
  std::vector<double> y(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) y[i] = f(grid[i]);
  return y;
}

namespace detail {
inline double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

inline Eigen::MatrixXd vandermonde(const Grid& grid, int degree) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(grid.size()), degree + 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      v(static_cast<Eigen::Index>(i), k) = p;
      p *= grid[i];
    }
  }
  return v;
}

/// Least squares with column-pivoted QR; a ridge-regularized normal-equation
/// solve (lambda = 1e-10) when the design is rank deficient.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, std::string* warning) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() == a.cols()) return qr.solve(y);
  if (warning) *warning = "rank-deficient design (rank " + std::to_string(qr.rank()) + " of " + std::to_string(a.cols()) + "); ridge 1e-10 applied";
  const Eigen::MatrixXd n = a.transpose() * a + 1e-10 * Eigen::MatrixXd::Identity(a.cols(), a.cols());
  return n.ldlt().solve(a.transpose() * y);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

struct PolyFit {
  UniPoly<double> poly;
  double residual = 0.0;  // RMS over the grid
  std::string warning;
};

inline PolyFit fit_poly_ls(const std::vector<double>& y, int degree, const Grid& grid) {
  if (degree < 0) throw PreconditionError("polynomial fit needs degree >= 0");
  if (y.size() != grid.size()) throw PreconditionError("target sample count does not match grid");
  PolyFit out;
  const Eigen::VectorXd c =
      detail::least_squares(detail::vandermonde(grid, degree), Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())), &out.warning);
  out.poly = UniPoly<double>(std::vector<double>(c.data(), c.data() + c.size()));
  std::vector<double> fit(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) fit[i] = out.poly(grid[i]);
  out.residual = detail::rms(fit, y);
  return out;
}

inline PolyFit fit_poly_ls(const Target& f, int degree, const Grid& grid) { return fit_poly_ls(sample_target(f, grid), degree, grid); }

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

struct RationalFit {
  RationalFn<double> fn;
  double residual = 0.0;  // RMS of p/q − f over the grid
  double min_den = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string warning;
};

/// Linearized least squares for p/q with deg p = deg q = degree and q(0) = 1:
/// each pass solves min sum w_i (p(x_i) − f_i q(x_i))^2 with w_i = 1/q_prev(x_i)^2.
/// A pass whose denominator is not positive on the grid is pulled back toward
/// the previous denominator (halving the step, up to 10 times) and its
/// numerator refit; if that fails the previous iterate is kept. Pass 0 is the
/// polynomial fit. The best iterate is then refined by Levenberg-Marquardt on
/// the unlinearized residual for up to `refine_steps` accepted steps.
inline RationalFit fit_rational_ls(const std::vector<double>& y, int degree, const Grid& grid, int iterations = 20,
                                   bool freeze_denominator = false, int refine_steps = 200) {
  if (degree < 0) throw PreconditionError("rational fit needs degree >= 0");
  if (iterations < 1) throw PreconditionError("rational fit needs iterations >= 1");
  const Interval dom = grid.interval();
  RationalFit best;
  auto make = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return RationalFn<double>(SparsePoly<double>::from_uni(UniPoly<double>(std::vector<double>(p.data(), p.data() + p.size()))),
                              SparsePoly<double>::from_uni(UniPoly<double>(std::vector<double>(q.data(), q.data() + q.size()))),
                              {dom});
  };
  auto score = [&](RationalFit& r) {
    std::vector<double> fit(grid.size());
    r.min_den = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      r.min_den = std::min(r.min_den, r.fn.den.eval(&x));
      fit[i] = r.fn.eval(&x);
    }
    r.residual = detail::rms(fit, y);
  };

  if (freeze_denominator) {
    const auto pf = fit_poly_ls(y, degree, grid);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(degree + 1);
    for (int k = 0; k <= pf.poly.degree(); ++k) p[k] = pf.poly.coeff(k);
    best.fn = make(p, Eigen::VectorXd::Ones(1));
    best.warning = pf.warning;
    best.iterations = 1;
    best.converged = true;
    score(best);
    return best;
  }

  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::MatrixXd v = detail::vandermonde(grid, degree);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  // Numerator for a fixed denominator: min sum ((p − f q)/q)^2.
  auto numerator_for = [&](const Eigen::VectorXd& qvals, std::string* warn) {
    Eigen::MatrixXd a = v;
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a.row(i) /= qvals[i];
      rhs[i] = yv[i];
    }
    return detail::least_squares(a, rhs, warn);
  };
  Eigen::VectorXd qprev = Eigen::VectorXd::Zero(degree + 1);
  qprev[0] = 1.0;
  Eigen::VectorXd qprev_vals = Eigen::VectorXd::Ones(n);
  best.fn = make(numerator_for(qprev_vals, &best.warning), qprev);
  score(best);
  double last = best.residual;
  for (int it = 1; it <= iterations; ++it) {
    // Unknowns: p_0..p_D, q_1..q_D.
    Eigen::MatrixXd a(n, 2 * degree + 1);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = 1.0 / qprev_vals[i];
      for (int k = 0; k <= degree; ++k) a(i, k) = w * v(i, k);
      for (int k = 1; k <= degree; ++k) a(i, degree + k) = -w * yv[i] * v(i, k);
      rhs[i] = w * yv[i];
    }
    std::string warn;
    const Eigen::VectorXd sol = detail::least_squares(a, rhs, &warn);
    Eigen::VectorXd p = sol.head(degree + 1);
    Eigen::VectorXd qn(degree + 1);
    qn[0] = 1.0;
    qn.tail(degree) = sol.tail(degree);
    Eigen::VectorXd qvals = v * qn;
    if (!(qvals.minCoeff() > 0.0) || !sol.allFinite()) {
      // Step back toward the previous (positive) denominator.
      bool found = false;
      const Eigen::VectorXd target_q = sol.allFinite() ? qn : qprev;
      for (double t = 0.5; t > 1e-3; t *= 0.5) {
        qn = (1.0 - t) * qprev + t * target_q;
        qvals = v * qn;
        if (qvals.minCoeff() > 0.0) {
          found = true;
          break;
        }
      }
      if (!found) {
        if (best.warning.empty()) best.warning = "denominator lost positivity at pass " + std::to_string(it) + "; kept previous iterate";
        break;
      }
      p = numerator_for(qvals, &warn);
    }
    RationalFit cur;
    cur.fn = make(p, qn);
    cur.iterations = it;
    cur.warning = warn;
    score(cur);
    if (cur.residual < best.residual) {
      const std::string keep = best.warning;
      best = cur;
      if (best.warning.empty()) best.warning = keep;
    }
    if (std::abs(last - cur.residual) <= 1e-12 * (1.0 + cur.residual)) {
      best.converged = true;
      break;
    }
    last = cur.residual;
    qprev = qn;
    qprev_vals = qvals;
  }
  if (!std::isfinite(best.residual)) throw EvaluationError("rational fit produced no admissible iterate");

  // Levenberg-Marquardt on r_i = p(x_i)/q(x_i) − f_i from the best iterate.
  // Steps that break positivity or raise the residual are rejected.
  auto coeffs = [&](const SparsePoly<double>& poly, int len) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(len);
    for (std::size_t i = 0; i < poly.term_count(); ++i) c[static_cast<Eigen::Index>(poly.exps(i)[0])] = poly.coef(i);
    return c;
  };
  Eigen::VectorXd pc = coeffs(best.fn.num, degree + 1), qc = coeffs(best.fn.den, degree + 1);
  const double q0 = qc[0];
  pc /= q0;
  qc /= q0;
  double lambda = 1e-3;
  double cur = best.residual;
  for (int step = 0; step < refine_steps && degree > 0; ++step) {
    const Eigen::VectorXd pv = v * pc, qv = v * qc;
    Eigen::MatrixXd j(n, 2 * degree + 1);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double inv = 1.0 / qv[i], val = pv[i] * inv;
      r[i] = val - yv[i];
      for (int k = 0; k <= degree; ++k) j(i, k) = v(i, k) * inv;
      for (int k = 1; k <= degree; ++k) j(i, degree + k) = -val * inv * v(i, k);
    }
    bool accepted = false;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      Eigen::MatrixXd aug(n + j.cols(), j.cols());
      aug.topRows(n) = j;
      aug.bottomRows(j.cols()) = std::sqrt(lambda) * j.colwise().norm().asDiagonal().toDenseMatrix();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + j.cols());
      rhs.head(n) = -r;
      const Eigen::VectorXd delta = aug.colPivHouseholderQr().solve(rhs);
      Eigen::VectorXd pt = pc + delta.head(degree + 1), qt = qc;
      qt.tail(degree) += delta.tail(degree);
      const Eigen::VectorXd qtv = v * qt;
      if (delta.allFinite() && qtv.minCoeff() > 0.0) {
        const Eigen::VectorXd ptv = v * pt;
        const double res = std::sqrt((ptv.cwiseQuotient(qtv) - yv).squaredNorm() / static_cast<double>(n));
        if (res < cur) {
          pc = pt;
          qc = qt;
          cur = res;
          lambda = std::max(lambda * 0.3, 1e-12);
          accepted = true;
          continue;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  if (cur < best.residual) {
    best.fn = make(pc, qc);
    score(best);
  }
  return best;
}

inline RationalFit fit_rational_ls(const Target& f, int degree, const Grid& grid, int iterations = 20,
                                   bool freeze_denominator = false, int refine_steps = 200) {
  return fit_rational_ls(sample_target(f, grid), degree, grid, iterations, freeze_denominator, refine_steps);
}

// ---------------------------------------------------------------------------
// ReLU networks
// ---------------------------------------------------------------------------

struct NetFit {
  ReluNet net;
  double loss = 0.0;  // mean squared error
  int iterations = 0;
  int halvings = 0;
  std::vector<double> loss_history;  // accepted losses, one per iteration
};

/// Full-batch gradient descent on mean squared error for a univariate net with
/// ReLU hidden layers `widths` and an identity output. The subgradient at the
/// kink is 0. A step that raises the loss or is non-finite is rejected and the
/// step halved (at most 20 times in a row, then training stops); an accepted
/// step grows the rate by 10%, capped at 10x the initial rate.
inline NetFit fit_relu_net(const std::vector<double>& y, const Grid& grid, const std::vector<int>& widths = {3, 3},
                           int iterations = 10000, std::uint64_t seed = 1, double learning_rate = 0.05) {
  if (widths.empty()) throw PreconditionError("network fit needs at least one hidden layer");
  if (iterations < 1) throw PreconditionError("network fit needs iterations >= 1");
  const auto n = static_cast<Eigen::Index>(grid.size());
  const std::size_t L = widths.size();
  std::vector<Eigen::MatrixXd> w(L + 1);
  std::vector<Eigen::VectorXd> b(L + 1);
  std::mt19937_64 rng(seed);
  int prev = 1;
  for (std::size_t l = 0; l <= L; ++l) {
    const int rows = l < L ? widths[l] : 1;
    const double s = std::sqrt(6.0 / (prev + rows));
    w[l].resize(rows, prev);
    b[l].resize(rows);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < prev; ++c) w[l](r, c) = uniform(rng, -s, s);
      b[l][r] = uniform(rng, -0.5, 0.5);
    }
    prev = rows;
  }
  Eigen::RowVectorXd x(n), target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = grid[static_cast<std::size_t>(i)];
    target[i] = y[static_cast<std::size_t>(i)];
  }

  std::vector<Eigen::MatrixXd> h(L + 2);
  auto forward = [&](const std::vector<Eigen::MatrixXd>& W, const std::vector<Eigen::VectorXd>& B) {
    h[0] = x;
    for (std::size_t l = 0; l <= L; ++l) {
      Eigen::MatrixXd z = W[l] * h[l];
      z.colwise() += B[l];
      h[l + 1] = l < L ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    const Eigen::RowVectorXd r = h[L + 1].row(0) - target;
    return r.squaredNorm() / static_cast<double>(n);
  };

  NetFit out;
  double loss = forward(w, b);
  double lr = learning_rate;
  int streak = 0;
  std::vector<Eigen::MatrixXd> gw(L + 1), tw(L + 1);
  std::vector<Eigen::VectorXd> gb(L + 1), tb(L + 1);
  for (int it = 0; it < iterations; ++it) {
    forward(w, b);
    Eigen::MatrixXd delta = (2.0 / static_cast<double>(n)) * (h[L + 1].row(0) - target);
    for (std::size_t l = L + 1; l-- > 0;) {
      gw[l] = delta * h[l].transpose();
      gb[l] = delta.rowwise().sum();
      if (l > 0) {
        Eigen::MatrixXd back = w[l].transpose() * delta;
        delta = back.cwiseProduct((h[l].array() > 0.0).cast<double>().matrix());
      }
    }
    bool accepted = false;
    while (!accepted) {
      for (std::size_t l = 0; l <= L; ++l) {
        tw[l] = w[l] - lr * gw[l];
        tb[l] = b[l] - lr * gb[l];
      }
      const double trial = forward(tw, tb);
      if (std::isfinite(trial) && trial <= loss) {
        w.swap(tw);
        b.swap(tb);
        loss = trial;
        lr = std::min(lr * 1.1, 10.0 * learning_rate);
        streak = 0;
        accepted = true;
      } else {
        lr *= 0.5;
        ++out.halvings;
        if (++streak > 20) break;
      }
    }
    if (!accepted) break;
    out.loss_history.push_back(loss);
    ++out.iterations;
  }

  std::vector<Layer> layers;
  for (std::size_t l = 0; l <= L; ++l) layers.push_back(Layer::dense(w[l], b[l], l < L ? Activation::ReLU : Activation::Identity));
  out.net = ReluNet(1, std::move(layers));
  out.loss = loss;
  return out;
}

inline NetFit fit_relu_net(const Target& f, const FitConfig& cfg) {
  return fit_relu_net(sample_target(f, cfg.grid), cfg.grid, cfg.widths, cfg.iterations, cfg.seed, cfg.learning_rate);
}

// ---------------------------------------------------------------------------
// Named targets
// ---------------------------------------------------------------------------

struct NamedTarget {
  std::string name;
  Target f;
  Interval interval;
};

/// spike: 1/x on [1/4, 1], 0 elsewhere; threshold: 1[x >= 0]; relu; triangle
/// (Δ); triangle3 (Δ^3); recip: 1/x on [1/2, 3/4].
inline NamedTarget target_by_name(const std::string& name) {
  if (name == "spike") return {name, [](double x) { return x >= 0.25 ? 1.0 / x : 0.0; }, Interval(0.0, 1.0)};
  if (name == "threshold") return {name, [](double x) { return x >= 0.0 ? 1.0 : 0.0; }, Interval(-1.0, 1.0)};
  if (name == "relu") return {name, [](double x) { return std::max(0.0, x); }, Interval(-1.0, 1.0)};
  if (name == "triangle") return {name, [](double x) { return triangle(x); }, Interval(0.0, 1.0)};
  if (name == "triangle3") return {name, [](double x) { return triangle_power(3, x); }, Interval(0.0, 1.0)};
  if (name == "recip") return {name, [](double x) { return 1.0 / x; }, Interval(0.5, 0.75)};
  throw PreconditionError("unknown target '" + name + "' (spike, threshold, relu, triangle, triangle3, recip)");
}

// ---------------------------------------------------------------------------
// Shallow-network sweeps against 1/x on [1/2, 3/4]
// ---------------------------------------------------------------------------

/// `random_count` nets with l hidden layers of width m and weights uniform in
/// [-s, s] (s cycling through 1..4), followed by `trained_count` nets of the
/// same shape fitted to 1/x on [1/2, 3/4] from different seeds.
inline std::vector<ReluNet> shallow_sweep_nets(int m, int l, std::size_t random_count, std::size_t trained_count,
                                               std::uint64_t seed, int iterations = 2000) {
  if (m < 1 || l < 1) throw PreconditionError("sweep needs m, l >= 1");
  const std::vector<int> widths(static_cast<std::size_t>(l), m);
  std::vector<ReluNet> nets;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < random_count; ++i) nets.push_back(random_relu_net(1, widths, rng, 1.0 + static_cast<double>(i % 4)));
  const auto t = target_by_name("recip");
  const Grid g(t.interval, 201);
  const auto y = sample_target(t.f, g);
  for (std::size_t i = 0; i < trained_count; ++i) nets.push_back(fit_relu_net(y, g, widths, iterations, seed + 1 + i, 0.01).net);
  return nets;
}

}  // namespace ratrelu
