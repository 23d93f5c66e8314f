#pragma once

// Lower-bound audits: few-term rationals against Δ^k, the rational network
// built from Δ^k, and shallow ReLU networks against 1/x.
//
// These are falsification sweeps over sampled candidates. A pass means no
// sampled candidate beat the bound, not that the bound is proven.

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ratrelu/algebra.hpp"
#include "ratrelu/net2rat.hpp"
#include "ratrelu/numcore.hpp"
#include "ratrelu/relunet.hpp"

namespace ratrelu {

inline constexpr std::size_t kSeparationGridN = (1u << 20) + 1;

struct SeparationReport {
  int k = 0;
  std::size_t term_budget = 0;  // 2^{k-2}
  std::size_t term_count = 0;
  int measured_crossings = 0;
  int descartes_bound = 0;      // sign_changes(2 num - den)
  double l1_gap = 0.0;
  double bound = 0.0;           // 1/64, or 1/128 against the rational network
  double counting_bound = 0.0;  // (1/32)(1 - 2 crossings / 2^k)
  double tolerance = 0.0;
  bool descartes_ok = false;    // crossings <= descartes_bound <= term_count
  bool counting_ok = false;     // l1_gap >= counting_bound - tolerance
  bool pass = false;            // l1_gap >= bound - tolerance

  static std::string csv_header() {
    return "k,term_budget,term_count,crossings,descartes_bound,l1_gap,bound,counting_bound,descartes_ok,counting_ok,pass";
  }
  std::string csv_row() const {
    std::ostringstream os;
    os << std::setprecision(12) << k << ',' << term_budget << ',' << term_count << ',' << measured_crossings << ','
       << descartes_bound << ',' << l1_gap << ',' << bound << ',' << counting_bound << ',' << descartes_ok << ','
       << counting_ok << ',' << pass;
    return os.str();
  }
};

inline std::vector<double> triangle_power_samples(int k, const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = triangle_power(k, grid[i]);
  return v;
}

namespace detail {
inline std::vector<double> rational_samples(const RationalFn<double>& g, const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    v[i] = g.eval(&x);
  }
  return v;
}

/// Separation of one candidate g from precomputed target samples f.
inline SeparationReport separation(int k, const RationalFn<double>& g, const std::vector<double>& f, const Grid& grid,
                                   double bound, double tol) {
  if (g.dim() != 1) throw PreconditionError("separation audit needs a univariate rational function");
  SeparationReport rep;
  rep.k = k;
  rep.term_budget = k >= 2 ? (std::size_t{1} << (k - 2)) : 1;
  rep.term_count = g.term_count();
  if (rep.term_count > rep.term_budget) {
    throw HypothesisError("candidate has " + std::to_string(rep.term_count) + " terms, budget 2^(k-2) = " +
                          std::to_string(rep.term_budget));
  }
  check_positive_denominator(g, make_box_samples(1, Interval(0.0, 1.0), 4097));
  const auto cr = crossings_at_level(g, 0.5, Interval(0.0, 1.0), 4097);
  rep.measured_crossings = cr.crossings;
  rep.descartes_bound = cr.descartes_bound;
  rep.descartes_ok = cr.crossings <= cr.descartes_bound && static_cast<std::size_t>(cr.descartes_bound) <= rep.term_count;
  const auto gv = rational_samples(g, grid);
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff[i] = std::abs(f[i] - gv[i]);
    if (!std::isfinite(diff[i])) throw EvaluationError("non-finite candidate value at x = " + std::to_string(grid[i]));
  }
  rep.l1_gap = trapezoid(diff, grid.spacing());
  rep.bound = bound;
  rep.tolerance = tol;
  rep.counting_bound = (1.0 / 32.0) * (1.0 - 2.0 * cr.crossings / std::ldexp(1.0, k));
  rep.counting_ok = static_cast<std::size_t>(cr.crossings) > rep.term_budget || rep.l1_gap >= rep.counting_bound - tol;
  rep.pass = rep.l1_gap >= bound - tol;
  return rep;
}
}  // namespace detail

/// L1 gap of g from Δ^k on [0,1] at n = 2^20 + 1, crossings of g at 1/2 and
/// the Descartes chain. Refuses g with more than 2^{k-2} terms.
inline SeparationReport theorem2_audit(int k, const RationalFn<double>& g, std::size_t grid_n = kSeparationGridN,
                                       double tol = 1e-3) {
  if (k < 2) throw PreconditionError("theorem2_audit needs k >= 2");
  const Grid grid(Interval(0.0, 1.0), grid_n);
  return detail::separation(k, g, triangle_power_samples(k, grid), grid, 1.0 / 64.0, tol);
}

/// Sweep form: target samples computed once.
inline std::vector<SeparationReport> theorem2_sweep(int k, const std::vector<RationalFn<double>>& candidates,
                                                    std::size_t grid_n = kSeparationGridN, double tol = 1e-3) {
  if (k < 2) throw PreconditionError("theorem2_sweep needs k >= 2");
  const Grid grid(Interval(0.0, 1.0), grid_n);
  const auto f = triangle_power_samples(k, grid);
  std::vector<SeparationReport> out;
  out.reserve(candidates.size());
  for (const auto& g : candidates) out.push_back(detail::separation(k, g, f, grid, 1.0 / 64.0, tol));
  return out;
}

/// Random univariate rational with at most `max_terms` terms in total:
/// coefficients uniform in [-1,1], distinct exponents in [0, max_exponent],
/// and a denominator with a constant term raised until its minimum over a
/// 4097-point grid of [0,1] is at least 0.1.
inline RationalFn<double> random_few_term_rational(std::mt19937_64& rng, std::size_t max_terms = 8, Exponent max_exponent = 40) {
  if (max_terms < 2) throw PreconditionError("random rational needs at least two terms");
  const auto total = 2 + static_cast<std::size_t>(rng() % (max_terms - 1));
  const auto num_terms = 1 + static_cast<std::size_t>(rng() % (total - 1));
  const std::size_t den_terms = total - num_terms;
  auto draw = [&](std::size_t count, bool with_constant) {
    std::vector<Exponent> ex;
    if (with_constant) ex.push_back(0);
    while (ex.size() < count) {
      const auto e = static_cast<Exponent>(rng() % (max_exponent + 1));
      if (std::find(ex.begin(), ex.end(), e) == ex.end()) ex.push_back(e);
    }
    std::vector<SparsePoly<double>::Term> t;
    for (Exponent e : ex) {
      double c = uniform(rng, -1.0, 1.0);
      if (c == 0.0) c = 0.5;
      t.push_back({c, {e}});
    }
    return SparsePoly<double>(1, t);
  };
  const auto num = draw(num_terms, false);
  auto den = draw(den_terms, true);
  const Grid grid(Interval(0.0, 1.0), 4097);
  double lo = INFINITY;
  for (double x : grid) lo = std::min(lo, den.eval(&x));
  if (lo < 0.1) den = add(den, SparsePoly<double>::constant(1, 0.1 - lo));
  return RationalFn<double>(num, den, {Interval(0.0, 1.0)});
}

// ---------------------------------------------------------------------------
// Shallow networks against 1/x
// ---------------------------------------------------------------------------

/// 1 / (27648 (2m)^{2l}).
inline double prop4_bound(int m, int l) {
  if (m < 1 || l < 1) throw PreconditionError("prop4_bound needs m, l >= 1");
  return 1.0 / (27648.0 * std::pow(2.0 * m, 2.0 * l));
}

struct Prop4Report {
  int m = 0;
  int l = 0;
  double l1_gap = 0.0;         // exact integral over the affine pieces
  double l1_trapezoid = 0.0;   // trapezoid cross-check at n = 2^20 + 1
  double bound = 0.0;
  std::size_t pieces = 0;      // on [1/2, 3/4]
  double piece_bound = 0.0;    // 3 (2m)^l
  double tolerance = 0.0;
  bool pass = false;           // l1_gap >= bound - tolerance
  bool pieces_ok = false;

  static std::string csv_header() { return "m,l,l1_gap,l1_trapezoid,bound,pieces,piece_bound,pass,pieces_ok"; }
  std::string csv_row() const {
    std::ostringstream os;
    os << std::setprecision(12) << m << ',' << l << ',' << l1_gap << ',' << l1_trapezoid << ',' << bound << ',' << pieces << ','
       << piece_bound << ',' << pass << ',' << pieces_ok;
    return os.str();
  }
};

namespace detail {
/// ∫_a^b |1/x − (s x + c)| dx for 0 < a < b, splitting at the sign changes
/// of s x^2 + c x − 1.
inline double recip_affine_l1(double a, double b, double s, double c) {
  std::vector<double> cuts{a};
  auto add_root = [&](double x) {
    if (x > a && x < b) cuts.push_back(x);
  };
  if (s == 0.0) {
    if (c != 0.0) add_root(1.0 / c);
  } else {
    const double disc = c * c + 4.0 * s;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Stable quadratic roots.
      const double q = -0.5 * (c + std::copysign(sq, c));
      if (q != 0.0) {
        add_root(q / s);
        add_root(-1.0 / q);
      }
    }
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    const double integral = std::log(v / u) - 0.5 * s * (v * v - u * u) - c * (v - u);
    total += std::abs(integral);
  }
  return total;
}
}  // namespace detail

/// L1 distance of a univariate network from 1/x on [1/2, 3/4], computed
/// exactly over its affine pieces, against 1/(27648 (2m)^{2l}).
inline Prop4Report prop4_audit(const ReluNet& net, std::size_t grid_n = kSeparationGridN, double tol = 1e-9) {
  if (net.in_dim() != 1 || net.out_dim() != 1) throw PreconditionError("prop4_audit needs a univariate scalar network");
  const Interval dom(0.5, 0.75);
  Prop4Report rep;
  rep.m = std::max(1, net.activation_width());
  rep.l = std::max(1, net.activation_depth());
  rep.bound = prop4_bound(rep.m, rep.l);
  rep.tolerance = tol;
  const auto pw = enumerate_pieces(net, dom);
  rep.pieces = pw.pieces();
  rep.piece_bound = 3.0 * std::pow(2.0 * rep.m, rep.l);
  rep.pieces_ok = static_cast<double>(rep.pieces) <= rep.piece_bound;
  for (std::size_t i = 0; i < pw.pieces(); ++i) {
    rep.l1_gap += detail::recip_affine_l1(pw.knots[i], pw.knots[i + 1], pw.slope(i), pw.intercept(i));
  }
  const Grid grid(dom, grid_n);
  const auto v = net.eval_batch(grid.points());
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = std::abs(1.0 / grid[i] - v[i]);
  rep.l1_trapezoid = trapezoid(diff, grid.spacing());
  rep.pass = rep.l1_gap >= rep.bound - tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Rational network built from Δ^k
// ---------------------------------------------------------------------------

struct Corollary4Report {
  int k = 0;
  double eps = 0.0;
  int r = 0;
  double b = 0.0;
  double node_eps = 0.0;
  std::size_t nodes = 0;
  int layers = 0;
  double sup_gap = 0.0;        // rational network vs Δ^k on [0,1]
  double l1_perturbation = 0.0;
  double baseline_gap = 0.0;   // L1 gap of g = 1/2 from the rational network
  double bound = 1.0 / 128.0;
  double sweep_min_gap = INFINITY;
  std::size_t sweep_count = 0;
  std::size_t sweep_failures = 0;
  bool sup_ok = false;         // sup_gap <= eps
  bool baseline_ok = false;    // baseline_gap >= bound
  std::vector<SeparationReport> sweep;

  static std::string csv_header() {
    return "k,eps,r,b,node_eps,nodes,layers,sup_gap,l1_perturbation,baseline_gap,bound,sweep_min_gap,sweep_count,sweep_failures,sup_ok,baseline_ok";
  }
  std::string csv_row() const {
    std::ostringstream os;
    os << std::setprecision(12) << k << ',' << eps << ',' << r << ',' << b << ',' << node_eps << ',' << nodes << ',' << layers
       << ',' << sup_gap << ',' << l1_perturbation << ',' << baseline_gap << ',' << bound << ',' << sweep_min_gap << ','
       << sweep_count << ',' << sweep_failures << ',' << sup_ok << ',' << baseline_ok;
    return os.str();
  }
};

/// Substitutes Newman activations into Δ^k as built (weights 2 and −4, so the
/// normalized-network budget does not apply; the amplified budget with b = 2
/// is used instead) and audits the result against few-term rationals with
/// the halved bound 1/128.
inline Corollary4Report corollary4_scenario(int k, double eps = 1.0 / 256.0, std::size_t sweep = 100, std::uint64_t seed = 1,
                                            std::size_t grid_n = (1u << 18) + 1, double tol = 1e-3) {
  if (k < 3) throw PreconditionError("corollary4_scenario needs k >= 3");
  Corollary4Report rep;
  rep.k = k;
  rep.eps = eps;
  const ReluNet tri = build_triangle(k);
  const RationalNet rn = substitute_activation_amplified(tri, eps, 2.0);
  rep.r = rn.r();
  rep.b = rn.params.b;
  rep.node_eps = rn.node_eps;
  rep.nodes = rn.net.size();
  rep.layers = rn.net.depth();

  const Grid grid(Interval(0.0, 1.0), grid_n);
  const auto rv = rn.net.eval_batch(grid.points());
  const auto tv = triangle_power_samples(k, grid);
  std::vector<double> diff(grid.size()), base(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff[i] = std::abs(rv[i] - tv[i]);
    base[i] = std::abs(rv[i] - 0.5);
    rep.sup_gap = std::max(rep.sup_gap, diff[i]);
  }
  rep.l1_perturbation = trapezoid(diff, grid.spacing());
  rep.baseline_gap = trapezoid(base, grid.spacing());
  rep.sup_ok = rep.sup_gap <= eps;
  rep.baseline_ok = rep.baseline_gap >= rep.bound;

  std::mt19937_64 rng(seed);
  const std::size_t budget = std::size_t{1} << (k - 2);
  for (std::size_t i = 0; i < sweep; ++i) {
    const auto g = random_few_term_rational(rng, std::max<std::size_t>(2, budget));
    auto s = detail::separation(k, g, rv, grid, rep.bound, tol);
    rep.sweep_min_gap = std::min(rep.sweep_min_gap, s.l1_gap);
    if (!s.pass) ++rep.sweep_failures;
    rep.sweep.push_back(std::move(s));
  }
  rep.sweep_count = sweep;
  return rep;
}

}  // namespace ratrelu
