#pragma once

// Newman polynomials and the rational approximants of |x|, the ReLU and the
// step function built from them.

#include <cmath>
#include <vector>

#include "ratrelu/algebra.hpp"
#include "ratrelu/numcore.hpp"

namespace ratrelu {

inline constexpr int kMaxExplicitNewmanDegree = FactoredUniPoly::kMaxExpansionDegree;

struct NewmanParams {
  int r = 5;
  double b = 1.0;
  double alpha = 0.0;
  double eps_rb = 0.0;

  NewmanParams() : NewmanParams(5, 1.0) {}
  NewmanParams(int r_, double b_) : r(r_), b(b_) {
    if (r < 5) throw PreconditionError("Newman degree r must be >= 5, got " + std::to_string(r));
    if (!(b >= 1.0) || !std::isfinite(b)) throw PreconditionError("Newman scale b must be >= 1");
    alpha = std::exp(-1.0 / std::sqrt(static_cast<double>(r)));
    eps_rb = 1.5 * std::exp(-std::sqrt(static_cast<double>(r)));
  }
  bool operator==(const NewmanParams&) const = default;
};

/// N_r(x) = prod_{i=1}^{r-1} (x + alpha^i).
inline FactoredUniPoly newman_poly(int r) {
  const NewmanParams p(r, 1.0);
  FactoredUniPoly f;
  f.scale = 1.0;
  for (int i = 1; i < p.r; ++i) f.roots.push_back(-std::pow(p.alpha, i));
  return f;
}

// ---------------------------------------------------------------------------
// Stable factored evaluation. With u = |x| and t(u) = N(-u)/N(u) =
// prod (alpha^i - u)/(alpha^i + u), every approximant is a simple function of t.
// ---------------------------------------------------------------------------

namespace detail {
inline double newman_t(int r, double u) {
  const double s = std::sqrt(static_cast<double>(r));
  double t = 1.0;
  for (int i = 1; i < r; ++i) {
    const double a = std::exp(-static_cast<double>(i) / s);
    t *= (a - u) / (a + u);
  }
  return t;
}
}  // namespace detail

/// A_r(x) = x (N(x) - N(-x)) / (N(x) + N(-x)).
inline double newman_abs_eval(int r, double x) {
  const double u = std::abs(x);
  if (u == 0.0) return 0.0;
  const double t = detail::newman_t(r, u);
  return u * (1.0 - t) / (1.0 + t);
}

/// N(x) / (N(x) + N(-x)).
inline double newman_threshold_eval(int r, double x) {
  const double t = detail::newman_t(r, std::abs(x));
  const double pos = 1.0 / (1.0 + t);
  return x >= 0.0 ? pos : 1.0 - pos;
}

/// Factored evaluator of the ReLU approximants for fixed (r, b).
class NewmanRelu {
 public:
  explicit NewmanRelu(NewmanParams p) : p_(p) {
    const double s = std::sqrt(static_cast<double>(p.r));
    for (int i = 1; i < p.r; ++i) powers_.push_back(std::exp(-static_cast<double>(i) / s));
  }

  const NewmanParams& params() const { return p_; }

  /// (x + b A_r(x/b)) / 2, which simplifies to x N(x/b) / (N(x/b) + N(-x/b)).
  double tilde(double x) const {
    const double u = std::abs(x) / p_.b;
    double t = 1.0;
    for (double a : powers_) t *= (a - u) / (a + u);
    const double pos = 1.0 / (1.0 + t);
    return x * (x >= 0.0 ? pos : 1.0 - pos);
  }

  /// (1 - 2 eps) tilde(x) + b eps.
  double operator()(double x) const { return (1.0 - 2.0 * p_.eps_rb) * tilde(x) + p_.b * p_.eps_rb; }

 private:
  NewmanParams p_;
  std::vector<double> powers_;
};

// ---------------------------------------------------------------------------
// Explicit-coefficient forms (r <= 64), expanded in T.
// ---------------------------------------------------------------------------

namespace detail {
template <class T>
std::vector<T> newman_coeffs(int r, double b) {
  if (r > kMaxExplicitNewmanDegree) {
    throw PreconditionError("explicit Newman coefficients are limited to r <= 64, got r = " + std::to_string(r));
  }
  using std::exp;
  using std::sqrt;
  // Roots in T so the expansion does not inherit double rounding of alpha^i.
  std::vector<T> c{T(1)};
  const T s = sqrt(T(r));
  for (int i = 1; i < r; ++i) {
    const T a = exp(-T(i) / s);
    std::vector<T> next(c.size() + 1, T(0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] += c[k] * a;
    }
    c = std::move(next);
  }
  // N(x/b)
  T scale(1);
  for (auto& v : c) {
    v *= scale;
    scale /= T(b);
  }
  return c;
}

template <class T>
T exp_t(const T& v) {
  using std::exp;
  return exp(v);
}
}  // namespace detail

/// Explicit N_r coefficients, ascending.
template <class T = double>
UniPoly<T> newman_poly_expanded(int r) {
  NewmanParams check(r, 1.0);
  (void)check;
  return UniPoly<T>(detail::newman_coeffs<T>(r, 1.0));
}

namespace detail {
/// Splits c (coefficients of N(x/b)) into even part E = N + N(-) and odd part O = N - N(-).
template <class T>
void even_odd(const std::vector<T>& c, std::vector<T>& even, std::vector<T>& odd) {
  even.assign(c.size(), T(0));
  odd.assign(c.size(), T(0));
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k % 2 == 0) even[k] = 2 * c[k];
    else odd[k] = 2 * c[k];
  }
}

template <class T>
RationalFn<T> uni_rational(std::vector<T> num, std::vector<T> den, Interval dom) {
  // Normalize so that den(0) = 1; den has nonnegative even coefficients, so den >= 1 everywhere.
  const T d0 = den.front();
  for (auto& v : num) v /= d0;
  for (auto& v : den) v /= d0;
  return RationalFn<T>(SparsePoly<T>::from_uni(UniPoly<T>(std::move(num))), SparsePoly<T>::from_uni(UniPoly<T>(std::move(den))),
                       {dom});
}
}  // namespace detail

/// A_r as an explicit rational on [-1, 1].
template <class T = double>
RationalFn<T> newman_abs(int r) {
  NewmanParams p(r, 1.0);
  std::vector<T> even, odd;
  detail::even_odd(detail::newman_coeffs<T>(r, 1.0), even, odd);
  std::vector<T> num(odd.size() + 1, T(0));
  for (std::size_t k = 0; k < odd.size(); ++k) num[k + 1] = odd[k];
  return detail::uni_rational(std::move(num), std::move(even), Interval(-1.0, 1.0));
}

template <class T = double>
struct NewmanReluPair {
  RationalFn<T> tilde;
  RationalFn<T> clipped;
};

/// The ReLU approximants on [-b, b]:
///   tilde   = x N(x/b) / E(x/b)
///   clipped = ((1 - 2 eps) x N(x/b) + b eps E(x/b)) / E(x/b)
/// with E(u) = N(u) + N(-u).
template <class T = double>
NewmanReluPair<T> newman_relu(int r, double b) {
  NewmanParams p(r, b);
  if (p.eps_rb > 0.5) throw PreconditionError("eps_{r,b} exceeds 1/2; the clipped approximant is undefined");
  const std::vector<T> c = detail::newman_coeffs<T>(r, b);
  std::vector<T> even, odd;
  detail::even_odd(c, even, odd);
  std::vector<T> xn(c.size() + 1, T(0));
  for (std::size_t k = 0; k < c.size(); ++k) xn[k + 1] = c[k];
  const Interval dom(-b, b);
  using std::sqrt;
  const T e = T(1.5) * detail::exp_t(-sqrt(T(r)));
  std::vector<T> clipped(xn.size(), T(0));
  for (std::size_t k = 0; k < xn.size(); ++k) clipped[k] = (T(1) - 2 * e) * xn[k];
  for (std::size_t k = 0; k < even.size(); ++k) clipped[k] += T(b) * e * even[k];
  NewmanReluPair<T> out{detail::uni_rational(xn, even, dom), detail::uni_rational(std::move(clipped), even, dom)};
  return out;
}

/// N(x) / (N(x) + N(-x)) on [-1, 1].
template <class T = double>
RationalFn<T> newman_threshold(int r) {
  NewmanParams p(r, 1.0);
  const std::vector<T> c = detail::newman_coeffs<T>(r, 1.0);
  std::vector<T> even, odd;
  detail::even_odd(c, even, odd);
  return detail::uni_rational(c, std::move(even), Interval(-1.0, 1.0));
}

/// Smallest r >= 5 with C exp(-sqrt r) <= eps, where C = 9b/2 for the clipped
/// approximant (3 b eps_{r,b}) and C = 3b/2 for the unclipped one (b eps_{r,b}).
inline int required_degree(double eps, double b, bool clipped = true) {
  if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("required_degree needs eps in (0, 1]");
  if (!(b >= 1.0)) throw PreconditionError("required_degree needs b >= 1");
  const double c = clipped ? 4.5 * b : 1.5 * b;
  auto ok = [&](int r) { return c * std::exp(-std::sqrt(static_cast<double>(r))) <= eps; };
  const double l = std::log(c / eps);
  int r = std::max(5, static_cast<int>(std::ceil(l > 0 ? l * l : 0.0)));
  while (r > 5 && ok(r - 1)) --r;
  while (!ok(r)) ++r;
  return r;
}

}  // namespace ratrelu
