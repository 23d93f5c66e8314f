#pragma once

// ReLU network -> rational network -> single rational function.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ratrelu/algebra.hpp"
#include "ratrelu/newman.hpp"
#include "ratrelu/numcore.hpp"
#include "ratrelu/relunet.hpp"

namespace ratrelu {

/// A network whose nonlinear layers all use one shared Newman activation.
struct RationalNet {
  ReluNet net;
  NewmanParams params;
  double eps = 0.0;        // overall target
  double node_eps = 0.0;   // accuracy demanded of the activation, 3 b eps_{r,b} <= node_eps
  int l = 0;               // nonlinear layers replaced

  int r() const { return params.r; }
  double operator()(double x) const { return net(x); }
  double eval(const double* x) const { return net.eval(x); }
};

/// Replaces every ReLU layer with R_{r,b}. No hypothesis check.
inline RationalNet substitute_with(const ReluNet& net, NewmanParams p) {
  auto act = RationalActivation::from_newman(p);
  RationalNet out;
  out.params = p;
  std::vector<Layer> layers = net.layers();
  for (auto& layer : layers) {
    if (layer.act == Activation::ReLU) {
      layer.act = Activation::Rational;
      layer.rational = act;
      ++out.l;
    } else if (layer.act == Activation::Rational) {
      throw PreconditionError("network already has rational activations");
    }
  }
  out.net = ReluNet(net.in_dim(), std::move(layers));
  out.node_eps = 3.0 * p.b * p.eps_rb;
  return out;
}

/// Per-layer budget eps / l with R_{r,1}, r = required_degree(eps / l, 1).
/// Refuses networks violating ||a||_1 + |b| <= 1 (the error bound relies on
/// every activation input staying in [-1, 1]).
inline RationalNet substitute_activation(const ReluNet& net, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("substitute_activation needs eps in (0, 1]");
  const auto rep = check_constraints(net);
  if (!rep.ok) throw HypothesisError("network violates ||a||_1 + |b| <= 1:\n" + rep.violations());
  const int l = std::max(1, net.activation_depth());
  const double budget = eps / l;
  RationalNet out = substitute_with(net, NewmanParams(required_degree(budget, 1.0), 1.0));
  out.eps = eps;
  out.node_eps = budget;
  return out;
}

/// For networks outside the normalized class: with L_j the largest row
/// l1-norm of layer j, the error after layer i obeys e_i <= L_i e_{i-1} + delta,
/// so delta = eps / sum_i prod_{j>i} L_j keeps the output within eps. `b` must
/// bound every pre-activation magnitude.
inline RationalNet substitute_activation_amplified(const ReluNet& net, double eps, double b) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("substitute_activation_amplified needs eps in (0, 1]");
  std::vector<double> lip;
  for (const auto& layer : net.layers()) {
    double m = 0.0;
    for (int r = 0; r < layer.out_dim(); ++r) {
      double s = 0.0;
      for (SparseMatrix::InnerIterator it(layer.w, r); it; ++it) s += std::abs(it.value());
      m = std::max(m, s);
    }
    lip.push_back(m);
  }
  double gain = 0.0;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (net.layers()[i].act != Activation::ReLU) continue;
    double p = 1.0;
    for (std::size_t j = i + 1; j < lip.size(); ++j) p *= lip[j];
    gain += p;
  }
  const double delta = eps / std::max(gain, 1.0);
  RationalNet out = substitute_with(net, NewmanParams(required_degree(delta, b), b));
  out.eps = eps;
  out.node_eps = delta;
  return out;
}

/// Largest |pre-activation| feeding a rational layer over the sample set.
inline double max_activation_input(const RationalNet& rnet, const BoxSamples& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.count(); ++i) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(s.point(i), s.dim);
    for (const auto& layer : rnet.net.layers()) {
      Eigen::VectorXd z = layer.w * v + layer.b;
      if (layer.act == Activation::Rational) worst = std::max(worst, z.cwiseAbs().maxCoeff());
      for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = layer.apply(z[k]);
      v = std::move(z);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Collapse
// ---------------------------------------------------------------------------

struct DegreeAudit {
  int r = 0;
  int m = 0;
  int l = 0;
  bool identity_output = false;
  double bound = 0.0;  // (r m)^l, times m for an identity output layer
  int actual = 0;

  bool ok() const { return actual <= bound; }
  static std::string csv_header() { return "r,m,l,bound,actual,ok"; }
  std::string csv_row() const {
    std::ostringstream os;
    os << std::setprecision(12) << r << ',' << m << ',' << l << ',' << bound << ',' << actual << ',' << (ok() ? 1 : 0);
    return os.str();
  }
};

struct CollapseResult {
  RationalFn<Extended> fn;
  DegreeAudit audit;
  unsigned precision_bits = 0;
};

namespace detail {
inline RationalFn<Extended> activation_rational(const RationalActivation& a) {
  if (a.newman) {
    if (a.newman->r > kMaxExplicitNewmanDegree) {
      throw PreconditionError("collapse needs explicit activation coefficients, available only for r <= 64 (got r = " +
                              std::to_string(a.newman->r) + "); use the substituted network instead");
    }
    return newman_relu<Extended>(a.newman->r, a.newman->b).clipped;
  }
  return a.fn->cast<Extended>();
}
}  // namespace detail

/// Multiply-adds that collapse would spend, from the dense-triangle term
/// count model used to plan desk-scale runs.
inline double collapse_work_estimate(const ReluNet& net, int r) {
  const int d = net.in_dim();
  auto terms = [d](double deg) {
    double t = 1.0;
    for (int k = 1; k <= d; ++k) t = t * (deg + k) / k;
    return t;
  };
  std::vector<double> prev(static_cast<std::size_t>(d), 1.0);
  double work = 0.0;
  bool first = true;
  for (const auto& layer : net.layers()) {
    std::vector<double> next;
    for (int row = 0; row < layer.out_dim(); ++row) {
      double deg = 0.0;
      for (SparseMatrix::InnerIterator it(layer.w, row); it; ++it) {
        const double dj = prev[static_cast<std::size_t>(it.col())];
        if (!first) work += 3.0 * terms(deg) * terms(dj);
        deg = first ? 1.0 : deg + dj;
      }
      if (layer.act != Activation::Identity) {
        for (int i = 1; i <= r; ++i) work += 3.0 * terms((i - 1) * deg) * terms(deg);
        deg *= r;
      }
      next.push_back(deg);
    }
    prev = std::move(next);
    first = false;
  }
  return work;
}

namespace detail {
inline CollapseResult collapse_at(const RationalNet& rnet, const ArithmeticLimits& lim, unsigned bits) {
  ScopedPrecision prec(bits);
  const ReluNet& net = rnet.net;
  const int d = net.in_dim();
  const std::vector<Interval> dom(static_cast<std::size_t>(d), Interval(-1.0, 1.0));
  using PE = SparsePoly<Extended>;
  using RE = RationalFn<Extended>;

  std::vector<RE> cur;
  for (int k = 0; k < d; ++k) cur.push_back(RE::polynomial(PE::variable(d, k), dom));

  int max_r = 0;
  for (std::size_t li = 0; li < net.layers().size(); ++li) {
    const Layer& layer = net.layers()[li];
    if (layer.act == Activation::ReLU) throw PreconditionError("collapse needs rational activations; substitute first");
    std::optional<RE> R;
    if (layer.act == Activation::Rational) {
      R = activation_rational(*layer.rational);
      max_r = std::max(max_r, R->degree());
    }
    std::vector<RE> next;
    next.reserve(static_cast<std::size_t>(layer.out_dim()));
    try {
      for (int row = 0; row < layer.out_dim(); ++row) {
        RE acc = RE::polynomial(PE::constant(d, Extended(layer.b[row])), dom);
        for (SparseMatrix::InnerIterator it(layer.w, row); it; ++it) {
          if (it.value() == 0.0) continue;
          acc = rat_add(acc, rat_scale(cur[static_cast<std::size_t>(it.col())], Extended(it.value())), lim);
        }
        next.push_back(R ? rat_compose_uni(*R, acc, lim) : std::move(acc));
      }
    } catch (const BlowupError& e) {
      throw BlowupError("collapse stopped in layer " + std::to_string(li) + " of " + std::to_string(net.layers().size()) +
                        ": " + e.what());
    }
    cur = std::move(next);
  }
  if (cur.size() != 1) throw PreconditionError("collapse needs a scalar-output network");

  CollapseResult res{std::move(cur[0]), {}, bits};
  DegreeAudit& a = res.audit;
  a.r = max_r;
  a.m = net.activation_width();
  a.l = net.activation_depth();
  a.identity_output = net.has_identity_output();
  a.bound = std::pow(static_cast<double>(a.r) * a.m, a.l) * (a.identity_output ? std::max(1, net.layers().back().in_dim()) : 1);
  if (a.l == 0) a.bound = 1.0;
  a.actual = res.fn.degree();
  return res;
}

/// log2 of the worst evaluation condition of f = num/den over the probes:
/// (sum |n_i x^e_i| + |f| sum |d_i x^e_i|) / (|den| (1 + |f|)).
inline double log2_condition(const RationalFn<Extended>& f, const BoxSamples& probes) {
  auto absolute = [](const SparsePoly<Extended>& p) {
    auto t = p.terms();
    for (auto& term : t) term.coef = abs(term.coef);
    return SparsePoly<Extended>(p.dim(), t);
  };
  const auto an = absolute(f.num), ad = absolute(f.den);
  double worst = 0.0;
  std::vector<Extended> x(static_cast<std::size_t>(probes.dim));
  std::vector<Extended> ax(x.size());
  for (std::size_t i = 0; i < probes.count(); ++i) {
    for (int k = 0; k < probes.dim; ++k) {
      x[static_cast<std::size_t>(k)] = Extended(probes.point(i)[k]);
      ax[static_cast<std::size_t>(k)] = abs(x[static_cast<std::size_t>(k)]);
    }
    const Extended den = f.den.eval(x);
    const Extended val = abs(f.num.eval(x) / den);
    const Extended c = (an.eval(ax) + val * ad.eval(ax)) / (abs(den) * (1 + val));
    if (c == 0) continue;
    const double l2 = static_cast<double>(log2(c));
    worst = std::max(worst, std::isfinite(l2) ? l2 : 1e9);
  }
  return worst;
}
}  // namespace detail

/// Rewrites the rational network as one rational function on [-1,1]^d by
/// composing layer by layer in extended precision. Zero weights are skipped.
///
/// Monomial coefficients of the composed function grow far beyond its values,
/// so `bits` is only the starting precision: the result is accepted once its
/// evaluation condition at probe points leaves 64 spare bits and it matches
/// the factored network there to 1e-9 (relative); otherwise the composition
/// is redone at higher precision, up to `max_bits`.
inline CollapseResult collapse(const RationalNet& rnet, const ArithmeticLimits& lim = {},
                               unsigned bits = precision_bits_from_env(), unsigned max_bits = 1u << 14) {
  const int d = rnet.net.in_dim();
  const auto probes = make_box_samples(d, Interval(-1.0, 1.0), d == 1 ? 65 : (d == 2 ? 81 : 128));
  const auto want = rnet.net.eval_batch(probes.coords);
  for (;;) {
    CollapseResult res = detail::collapse_at(rnet, lim, bits);
    ScopedPrecision prec(bits);
    const double cond = detail::log2_condition(res.fn, probes);
    bool agree = true;
    std::vector<Extended> x(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < probes.count() && agree; ++i) {
      for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = Extended(probes.point(i)[k]);
      const double got = static_cast<double>(res.fn.eval(x));
      agree = std::abs(got - want[i]) <= 1e-9 * (1.0 + std::abs(want[i]));
    }
    if (agree && cond + 64.0 <= bits) return res;
    if (bits >= max_bits) {
      throw BlowupError("collapse lost accuracy at the " + std::to_string(max_bits) + "-bit precision cap (condition 2^" +
                        std::to_string(static_cast<int>(cond)) + ")");
    }
    const double need = std::ceil((cond + 96.0) / 64.0) * 64.0;
    bits = std::min(max_bits, std::max(2 * bits, cond < 1e8 ? static_cast<unsigned>(need) : 2 * bits));
  }
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct NetToRationalResult {
  RationalNet rnet;
  CollapseResult collapsed;
  RationalFn<double> fn;       // coefficients rounded to double after a power-of-two rescale
  ErrorReport report;          // collapsed.fn (extended) vs the ReLU network on [-1,1]^d
  ErrorReport double_report;   // fn (evaluated in extended arithmetic) vs the ReLU network
  bool certified = false;      // report.sup_err <= eps
  double theorem_shape = 0.0;  // ln(l/eps)^l m^l
  double collapse_shape = 0.0; // (r m)^l
};

/// Evaluates a double-coefficient rational at samples using extended arithmetic.
inline std::vector<double> eval_rational_extended(const RationalFn<double>& f, const BoxSamples& s,
                                                  unsigned bits = precision_bits_from_env()) {
  ScopedPrecision prec(bits);
  const RationalFn<Extended> fe = f.cast<Extended>();
  std::vector<double> out(s.count());
  std::vector<Extended> x(static_cast<std::size_t>(s.dim));
  for (std::size_t i = 0; i < s.count(); ++i) {
    for (int k = 0; k < s.dim; ++k) x[static_cast<std::size_t>(k)] = Extended(s.point(i)[k]);
    out[i] = static_cast<double>(fe.eval(x));
  }
  return out;
}

/// Runs at the precision the coefficients were computed with.
inline std::vector<double> eval_rational_extended(const RationalFn<Extended>& f, const BoxSamples& s) {
  const unsigned digits = f.den.term_count() ? f.den.coef(0).precision() : Extended::default_precision();
  ScopedPrecision prec(std::max(digits10_to_bits(digits), 53u));
  std::vector<double> out(s.count());
  std::vector<Extended> x(static_cast<std::size_t>(s.dim));
  for (std::size_t i = 0; i < s.count(); ++i) {
    for (int k = 0; k < s.dim; ++k) x[static_cast<std::size_t>(k)] = Extended(s.point(i)[k]);
    out[i] = static_cast<double>(f.eval(x));
  }
  return out;
}

inline NetToRationalResult net_to_rational(const ReluNet& net, double eps, std::size_t samples = kCertificationGridN,
                                           const ArithmeticLimits& lim = {}, unsigned bits = precision_bits_from_env()) {
  NetToRationalResult res;
  res.rnet = substitute_activation(net, eps);
  if (res.rnet.r() > kMaxExplicitNewmanDegree) {
    throw PreconditionError("eps = " + std::to_string(eps) + " needs activation degree r = " + std::to_string(res.rnet.r()) +
                            " > 64; collapse is limited to explicit coefficients (substitution alone is still available)");
  }
  res.collapsed = collapse(res.rnet, lim, bits);
  res.fn = downcast_rescaled(res.collapsed.fn);
  const auto s = make_box_samples(net.in_dim(), Interval(-1.0, 1.0), samples);
  const auto want = net.eval_batch(s.coords);
  res.report = compare_on_samples(eval_rational_extended(res.collapsed.fn, s), want, s);
  res.double_report = compare_on_samples(eval_rational_extended(res.fn, s, res.collapsed.precision_bits), want, s);
  res.certified = res.report.sup_err <= eps;
  const double l = res.collapsed.audit.l, m = res.collapsed.audit.m;
  res.theorem_shape = l > 0 ? std::pow(std::log(l / eps), l) * std::pow(m, l) : 1.0;
  res.collapse_shape = res.collapsed.audit.bound;
  return res;
}

}  // namespace ratrelu
