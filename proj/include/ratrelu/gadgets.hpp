#pragma once

// ReLU gadgets for x^2, xy, x^y, polynomials, reciprocals, partitions of
// unity and division. Each gadget exists in two forms: a builder-level
// function that wires nodes into an existing NetBuilder, and a build_*
// wrapper that compiles a standalone network and reports its size.

#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ratrelu/algebra.hpp"
#include "ratrelu/numcore.hpp"
#include "ratrelu/relunet.hpp"

namespace ratrelu {

struct SizeReport {
  std::size_t nodes = 0;        // all nodes of the compiled network, carries included
  std::size_t relu_nodes = 0;   // ReLU nodes of the gadget DAG before layering
  int depth = 0;
  std::string claimed_shape;
  std::map<std::string, double> params;
  std::string choice;  // construction picked, where there is a choice

  static std::string csv_header() { return "nodes,relu_nodes,depth,claimed_shape,choice"; }
  std::string csv_row() const {
    std::ostringstream os;
    os << nodes << ',' << relu_nodes << ',' << depth << ",\"" << claimed_shape << "\"," << choice;
    return os.str();
  }
};

struct GadgetNet {
  ReluNet net;
  SizeReport size;
};

namespace detail {
inline void require_eps(double eps, const char* who) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError(std::string(who) + " needs eps in (0, 1]");
}

inline std::string shape(const std::string& expr, double value) {
  std::ostringstream os;
  os << expr << " = O(" << std::setprecision(4) << value << ")";
  return os.str();
}

inline GadgetNet finish(const NetBuilder& nb, const Lin& out, std::string claimed, std::map<std::string, double> params) {
  GadgetNet g{nb.compile(out), {}};
  g.size.nodes = g.net.size();
  g.size.relu_nodes = nb.relu_count();
  g.size.depth = g.net.depth();
  g.size.claimed_shape = std::move(claimed);
  g.size.params = std::move(params);
  return g;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Builder-level gadgets. Inputs are expected in the stated ranges; outside
// them the gadgets stay finite but carry no accuracy guarantee.
// ---------------------------------------------------------------------------

/// Δ(z) = σ(2σ(z) − 4σ(z − 1/2)).
inline Lin g_triangle(NetBuilder& nb, const Lin& z) {
  const Lin a = nb.relu(z);
  const Lin b = nb.relu(z - 0.5);
  return nb.relu(2.0 * a - 4.0 * b);
}

/// f_k(x) = x − sum_{i<=k} Δ^i(x)/4^i on [0,1] as a single ReLU node
/// (every partial sum is >= 0 there). Returns x itself for k = 0.
inline Lin g_square_levels(NetBuilder& nb, const Lin& x, int k) {
  Lin s = x;
  Lin t = x;
  double scale = 1.0;
  for (int i = 1; i <= k; ++i) {
    t = g_triangle(nb, t);
    scale *= 0.25;
    s = nb.relu(s - scale * t);
  }
  return s;
}

/// Smallest k >= 0 with 2^{-2k-2} <= eps.
inline int square_levels(double eps) {
  int k = 0;
  while (std::ldexp(1.0, -2 * k - 2) > eps) ++k;
  return k;
}

/// σ(v) − σ(v − hi): clamps v to [0, hi].
inline Lin g_clamp(NetBuilder& nb, const Lin& v, double hi = 1.0) { return nb.relu(v) - nb.relu(v - hi); }

/// xy on [0,B]^2 within eps; exactly 0 when x = 0 or y = 0.
inline Lin g_mul(NetBuilder& nb, const Lin& x, const Lin& y, double eps, double B = 1.0) {
  const int k = square_levels(eps / (8.0 * B * B));
  const double h = 0.5 / B;
  const Lin f1 = g_square_levels(nb, h * x + h * y, k);
  const Lin f2 = g_square_levels(nb, h * x, k);
  const Lin f3 = g_square_levels(nb, h * y, k);
  const Lin g = 2.0 * f1 - 2.0 * f2 - 2.0 * f3;
  return (B * B) * g_clamp(nb, g, 1.0);
}

/// x^y on [0,1] within eps by square-and-multiply over the bits of y,
/// most significant first, every step at accuracy eps / y^2.
inline Lin g_pow(NetBuilder& nb, const Lin& x, unsigned y, double eps) {
  if (y == 0) return Lin(1.0);
  const double step = eps / (static_cast<double>(y) * y);
  const int bits = std::bit_width(y);
  Lin v = x;
  for (int b = bits - 2; b >= 0; --b) {
    v = g_mul(nb, v, v, step);
    if ((y >> b) & 1U) v = g_mul(nb, v, x, step);
  }
  return g_clamp(nb, v, 1.0);
}

// ---------------------------------------------------------------------------
// Public builders
// ---------------------------------------------------------------------------

inline GadgetNet build_square_levels(int k) {
  if (k < 0) throw PreconditionError("square levels must be >= 0");
  NetBuilder nb(1, true);
  const Lin out = g_clamp(nb, g_square_levels(nb, nb.input(0), k));
  return detail::finish(nb, out, detail::shape("O(k)", k), {{"k", k}});
}

inline GadgetNet build_square(double eps) {
  detail::require_eps(eps, "build_square");
  const int k = square_levels(eps);
  auto g = build_square_levels(k);
  g.size.claimed_shape = detail::shape("O(ln(1/eps))", std::log(1.0 / eps));
  g.size.params = {{"eps", eps}, {"k", k}};
  return g;
}

inline GadgetNet build_mul(double eps, double B = 1.0) {
  detail::require_eps(eps, "build_mul");
  if (!(B >= 1.0)) throw PreconditionError("build_mul needs B >= 1");
  NetBuilder nb(2, true);
  const Lin out = g_mul(nb, nb.input(0), nb.input(1), eps, B);
  return detail::finish(nb, out, detail::shape("O(ln(B/eps))", std::log(B / eps)),
                        {{"eps", eps}, {"B", B}, {"k", square_levels(eps / (8 * B * B))}});
}

inline GadgetNet build_pow(unsigned y, double eps) {
  detail::require_eps(eps, "build_pow");
  if (y < 1) throw PreconditionError("build_pow needs y >= 1");
  NetBuilder nb(1, true);
  const Lin out = g_pow(nb, nb.input(0), y, eps);
  const double ly = std::log2(static_cast<double>(y)) + 1.0;
  return detail::finish(nb, out, detail::shape("O(ln(y) ln(y/eps))", ly * std::log(y / eps)), {{"eps", eps}, {"y", y}});
}

// ---------------------------------------------------------------------------
// Polynomials on [0,1]^d
// ---------------------------------------------------------------------------

namespace detail {
/// One monomial prod x_k^{e_k} at accuracy eps_mono. Construction "chain"
/// multiplies the r individual factors in sequence at eps_mono / r each;
/// construction "pow" raises each variable with g_pow and multiplies the at
/// most d powers, every gadget at eps_mono / (2d).
inline Lin g_monomial(NetBuilder& nb, const Exponent* e, int dim, double eps_mono, bool use_pow, int max_degree) {
  std::vector<Lin> factors;
  int deg = 0;
  for (int k = 0; k < dim; ++k) deg += static_cast<int>(e[k]);
  if (deg == 0) return Lin(1.0);
  if (!use_pow) {
    const double step = eps_mono / std::max(1, max_degree);
    Lin acc;
    bool first = true;
    for (int k = 0; k < dim; ++k) {
      for (Exponent j = 0; j < e[k]; ++j) {
        if (first) {
          acc = nb.input(k);
          first = false;
        } else {
          acc = g_clamp(nb, g_mul(nb, acc, nb.input(k), step));
        }
      }
    }
    return acc;
  }
  const double step = eps_mono / (2.0 * dim);
  for (int k = 0; k < dim; ++k) {
    if (e[k] == 0) continue;
    factors.push_back(e[k] == 1 ? nb.input(k) : g_pow(nb, nb.input(k), e[k], step));
  }
  Lin acc = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) acc = g_clamp(nb, g_mul(nb, acc, factors[i], step));
  return acc;
}

inline Lin g_polynomial_with(NetBuilder& nb, const SparsePoly<double>& p, double eps, bool use_pow) {
  const std::size_t s = std::max<std::size_t>(1, p.term_count());
  const double eps_mono = eps / static_cast<double>(s);
  const int r = std::max(1, p.degree());
  Lin out;
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    out = out + p.coef(i) * g_monomial(nb, p.exps(i), p.dim(), eps_mono, use_pow, r);
  }
  return out;
}
}  // namespace detail

/// Both constructions are tried in scratch builders; the one with fewer ReLU
/// nodes is wired into `nb`. `choice` receives "chain" or "pow".
inline Lin g_polynomial(NetBuilder& nb, const SparsePoly<double>& p, double eps, std::string* choice = nullptr) {
  NetBuilder a(nb.in_dim(), true), b(nb.in_dim(), true);
  detail::g_polynomial_with(a, p, eps, false);
  detail::g_polynomial_with(b, p, eps, true);
  const bool use_pow = b.relu_count() < a.relu_count();
  if (choice) *choice = use_pow ? "pow" : "chain";
  return detail::g_polynomial_with(nb, p, eps, use_pow);
}

namespace detail {
inline std::string point_str(const double* x, int d) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < d; ++k) os << (k ? ", " : "") << std::setprecision(17) << x[k];
  os << ")";
  return os.str();
}

inline void check_poly_range(const SparsePoly<double>& p, double lo, double hi, const char* what, std::size_t samples) {
  const auto s = make_box_samples(p.dim(), Interval(0.0, 1.0), samples);
  for (std::size_t i = 0; i < s.count(); ++i) {
    const double v = p.eval(s.point(i));
    if (v < lo - 1e-12 || v > hi + 1e-12) {
      std::ostringstream os;
      os << what << " = " << v << " leaves [" << lo << ", " << hi << "] at x = " << point_str(s.point(i), p.dim());
      throw PreconditionError(os.str());
    }
  }
}
}  // namespace detail

/// p on [0,1]^d within eps. Requires coefficients in [-1,1] and p([0,1]^d) in [-1,1].
inline GadgetNet build_polynomial(const SparsePoly<double>& p, double eps, std::size_t range_samples = 10000) {
  detail::require_eps(eps, "build_polynomial");
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    if (std::abs(p.coef(i)) > 1.0) throw PreconditionError("build_polynomial needs every coefficient in [-1, 1]");
  }
  detail::check_poly_range(p, -1.0, 1.0, "p(x)", range_samples);
  NetBuilder nb(p.dim(), true);
  std::string choice;
  const Lin out = g_polynomial(nb, p, eps, &choice);
  const double s = static_cast<double>(std::max<std::size_t>(1, p.term_count()));
  const double r = std::max(1, p.degree());
  auto g = detail::finish(nb, out,
                          detail::shape("O(min(s r ln(s r/eps), s d ln(d r s/eps)^2))",
                                        std::min(s * r * std::log(s * r / eps),
                                                 s * p.dim() * std::pow(std::log(p.dim() * r * s / eps), 2))),
                          {{"eps", eps}, {"s", s}, {"r", r}, {"d", p.dim()}});
  g.size.choice = choice;
  return g;
}

// ---------------------------------------------------------------------------
// Reciprocals and the multiplexer
// ---------------------------------------------------------------------------

struct RecipLocalParams {
  double c = 1.0;
  int r = 1;
  double eps0 = 0.0;
};

inline RecipLocalParams recip_local_params(double a, double b, double eps) {
  RecipLocalParams p;
  p.c = 1.0 / b;
  p.r = std::max(1, static_cast<int>(std::ceil(b * std::log(1.0 / (eps * a)) / a)));
  p.eps0 = eps / (static_cast<double>(p.r) * p.r * p.c);
  return p;
}

/// 1/x on [a,b] within 2 eps through c sum_{i<r} (1 − cx)^i, c = 1/b.
inline Lin g_recip_local(NetBuilder& nb, const Lin& x, double a, double b, double eps) {
  const auto p = recip_local_params(a, b, eps);
  const Lin z = nb.relu(1.0 - p.c * x);
  Lin sum(1.0);
  if (p.r >= 2) sum = sum + z;
  for (int i = 2; i < p.r; ++i) sum = sum + g_pow(nb, z, static_cast<unsigned>(i), std::min(1.0, p.eps0));
  return p.c * sum;
}

inline GadgetNet build_recip_local(double a, double b, double eps) {
  if (!(a > 0.0 && a <= b)) throw PreconditionError("build_recip_local needs 0 < a <= b");
  if (!(eps > 0.0)) throw PreconditionError("build_recip_local needs eps > 0");
  if (b > 1.0) throw PreconditionError("build_recip_local works on subintervals of [0, 1]");
  NetBuilder nb(1, true);
  const Lin out = g_recip_local(nb, nb.input(0), a, b, eps);
  const auto p = recip_local_params(a, b, eps);
  return detail::finish(nb, out, detail::shape("O((b/a) ln(1/(eps a)) ln(r/eps0))", p.r * std::log(p.r / p.eps0)),
                        {{"a", a}, {"b", b}, {"eps", eps}, {"c", p.c}, {"r", p.r}, {"eps0", p.eps0}});
}

/// Hat i over strictly increasing breakpoints: 0 outside (a_{i-1}, a_{i+1}), 1 at a_i.
inline Lin g_hat(NetBuilder& nb, const Lin& z, double lo, double mid, double hi) {
  const double w1 = mid - lo, w2 = hi - mid;
  const Lin u = (1.0 / w1) * nb.relu(z - lo) - (1.0 / w1 + 1.0 / w2) * nb.relu(z - mid) + (1.0 / w2) * nb.relu(z - hi);
  return nb.relu(u);
}

namespace detail {
inline void check_breakpoints(const std::vector<double>& a, std::size_t n) {
  if (a.size() != n + 2) throw PreconditionError("multiplexer needs n + 2 breakpoints for n subnets");
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (!(a[i] > a[i - 1])) {
      std::ostringstream os;
      os << "breakpoint order violation: a_" << i - 1 << " = " << a[i - 1] << " >= a_" << i << " = " << a[i];
      throw PreconditionError(os.str());
    }
  }
}
}  // namespace detail

/// sum_i mul(p_i(z), g_i) where g_i in [0,B].
inline Lin g_multiplexer(NetBuilder& nb, const Lin& z, const std::vector<double>& a, const std::vector<Lin>& g, double B,
                         double eps) {
  detail::check_breakpoints(a, g.size());
  Lin out;
  for (std::size_t i = 1; i <= g.size(); ++i) {
    const Lin p = g_hat(nb, z, a[i - 1], a[i], a[i + 1]);
    out = out + g_mul(nb, p, g[i - 1], eps, B);
  }
  return out;
}

inline GadgetNet build_multiplexer(const std::vector<double>& a, const std::vector<ReluNet>& subnets, double B, double eps) {
  detail::require_eps(eps, "build_multiplexer");
  if (subnets.empty()) throw PreconditionError("multiplexer needs at least one subnet");
  detail::check_breakpoints(a, subnets.size());
  NetBuilder nb(1, true);
  std::vector<Lin> g;
  for (const auto& s : subnets) g.push_back(nb.append(s, {nb.input(0)}).at(0));
  const Lin out = g_multiplexer(nb, nb.input(0), a, g, B, eps);
  return detail::finish(nb, out, detail::shape("O(n ln(B/eps))", subnets.size() * std::log(B / eps)),
                        {{"n", static_cast<double>(subnets.size())}, {"B", B}, {"eps", eps}});
}

/// Just the partition of unity (used to audit the hats).
inline std::vector<ReluNet> build_hats(const std::vector<double>& a) {
  detail::check_breakpoints(a, a.size() - 2);
  std::vector<ReluNet> out;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    NetBuilder nb(1, true);
    out.push_back(nb.compile(g_hat(nb, nb.input(0), a[i - 1], a[i], a[i + 1])));
  }
  return out;
}

/// 1/x on [2^{-k}, 1] within eps, range within [0, 2^k]. Scale i uses a
/// local reciprocal on the part of [a_{i-1}, a_{i+1}] inside [a_1, a_n]
/// (a_j = 2^{j-k-1}), clamped to [0, 2^{min(k+2-i, k)}]. For k = 0 a local
/// reciprocal on [1/2, 1] clamped to [0, 1] is returned.
inline Lin g_recip(NetBuilder& nb, const Lin& x, int k, double eps) {
  if (k == 0) return g_clamp(nb, g_recip_local(nb, x, 0.5, 1.0, eps / 2), 1.0);
  const int n = k + 1;
  std::vector<double> a;
  for (int j = 0; j <= k + 2; ++j) a.push_back(std::ldexp(1.0, j - k - 1));
  std::vector<Lin> g;
  for (int i = 1; i <= n; ++i) {
    const double lo = std::max(a[static_cast<std::size_t>(i) - 1], a[1]);
    const double hi = std::min(a[static_cast<std::size_t>(i) + 1], a[static_cast<std::size_t>(n)]);
    const Lin q = g_recip_local(nb, x, lo, hi, eps / 6.0);
    g.push_back(g_clamp(nb, q, std::ldexp(1.0, std::min(k + 2 - i, k))));
  }
  return g_multiplexer(nb, x, a, g, std::ldexp(1.0, k), eps / 3.0);
}

inline GadgetNet build_recip(int k, double eps) {
  detail::require_eps(eps, "build_recip");
  if (k < 0) throw PreconditionError("build_recip needs k >= 0");
  NetBuilder nb(1, true);
  const Lin out = g_recip(nb, nb.input(0), k, eps);
  const double l = std::log(1.0 / eps) + 1.0;
  return detail::finish(nb, out, detail::shape("O(k^2 ln(1/eps)^2)", (k + 1.0) * (k + 1.0) * l * l), {{"k", k}, {"eps", eps}});
}

// ---------------------------------------------------------------------------
// Division
// ---------------------------------------------------------------------------

struct DivisionResult {
  ReluNet net;
  SizeReport size;
  ErrorReport report;
};

/// p/q on [0,1]^d within eps, for p into [-1,1] and q into [2^{-k}, 1]:
///   h = 2^{k+1} (mul(f_{p+}, r) − mul(f_{p-}, r)),  r = 2^{-k-1} recip_{k+1}(clamp01(f_q)),
/// with p = p+ − p− split by coefficient sign and every gadget at eps/2^{2k+3}
/// (halved for the two signed halves).
inline DivisionResult build_division(const SparsePoly<double>& p, const SparsePoly<double>& q, int k, double eps,
                                     std::size_t samples = kCertificationGridN) {
  detail::require_eps(eps, "build_division");
  if (k < 0) throw PreconditionError("build_division needs k >= 0");
  if (p.dim() != q.dim()) throw PreconditionError("build_division: p and q dimensions differ");
  const int d = p.dim();
  const double lo_q = std::ldexp(1.0, -k);
  const auto s = make_box_samples(d, Interval(0.0, 1.0), samples);
  for (std::size_t i = 0; i < s.count(); ++i) {
    const double pv = p.eval(s.point(i)), qv = q.eval(s.point(i));
    if (pv < -1.0 - 1e-12 || pv > 1.0 + 1e-12) {
      throw PreconditionError("p(x) = " + std::to_string(pv) + " leaves [-1, 1] at x = " + detail::point_str(s.point(i), d));
    }
    if (qv < lo_q - 1e-12 || qv > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "q(x) = " << qv << " leaves [" << lo_q << ", 1] at x = " << detail::point_str(s.point(i), d);
      throw PreconditionError(os.str());
    }
  }
  for (const auto* poly : {&p, &q}) {
    for (std::size_t i = 0; i < poly->term_count(); ++i) {
      if (std::abs(poly->coef(i)) > 1.0) throw PreconditionError("build_division needs coefficients in [-1, 1]");
    }
  }

  const double eps0 = eps / std::ldexp(1.0, 2 * k + 3);
  std::vector<SparsePoly<double>::Term> pos, neg;
  for (const auto& t : p.terms()) (t.coef > 0 ? pos : neg).push_back({std::abs(t.coef), t.exps});
  const SparsePoly<double> pp(d, pos), pn(d, neg);

  NetBuilder nb(d, true);
  std::string choice_q, choice_p, choice_n;
  const Lin fq = g_clamp(nb, g_polynomial(nb, q, eps0, &choice_q), 1.0);
  const Lin rq = std::ldexp(1.0, -k - 1) * g_recip(nb, fq, k + 1, eps0);
  auto signed_part = [&](const SparsePoly<double>& part, std::string* choice) {
    if (part.is_zero()) return Lin();
    double B = 0.0;
    for (std::size_t i = 0; i < part.term_count(); ++i) B += part.coef(i);
    B = std::max(1.0, B);
    const Lin fp = g_clamp(nb, g_polynomial(nb, part, eps0 / 2, choice), B);
    return g_mul(nb, fp, rq, eps0 / 2, B);
  };
  const Lin hp = signed_part(pp, &choice_p);
  const Lin hn = signed_part(pn, &choice_n);
  const Lin out = std::ldexp(1.0, k + 1) * (hp - hn);

  DivisionResult res;
  auto g = detail::finish(nb, out, detail::shape("O(k^4 ln(1/eps)^3 + size(f_p) + size(f_q))", std::pow(k + 1.0, 4) * std::pow(std::log(1 / eps) + 1, 3)),
                          {{"k", k}, {"eps", eps}, {"eps0", eps0}, {"d", d}});
  g.size.choice = "q:" + choice_q + " p+:" + (choice_p.empty() ? "-" : choice_p) + " p-:" + (choice_n.empty() ? "-" : choice_n);
  res.net = std::move(g.net);
  res.size = std::move(g.size);

  const auto got = res.net.eval_batch(s.coords);
  std::vector<double> want(s.count());
  for (std::size_t i = 0; i < s.count(); ++i) want[i] = p.eval(s.point(i)) / q.eval(s.point(i));
  res.report = compare_on_samples(got, want, s);
  return res;
}

}  // namespace ratrelu
