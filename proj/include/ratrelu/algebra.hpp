#pragma once

// Polynomial and rational-function arithmetic. All arithmetic is unreduced
// (no GCD cancellation) so that degree bookkeeping stays faithful to the
// composition that produced an object.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratrelu/numcore.hpp"

namespace ratrelu {

using Exponent = std::uint32_t;

inline constexpr std::size_t kDefaultTermCap = 1'000'000;

struct ArithmeticLimits {
  std::size_t max_terms = kDefaultTermCap;
};

namespace detail {
template <class T>
bool is_zero(const T& v) {
  return v == 0;
}
template <class T>
bool finite_scalar(const T& v) {
  using boost::multiprecision::isfinite;
  using std::isfinite;
  return isfinite(v);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// UniPoly: dense univariate, ascending coefficients.
// ---------------------------------------------------------------------------

template <class T = double>
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  static UniPoly monomial(int k, T coef = T(1)) {
    std::vector<T> c(static_cast<std::size_t>(k) + 1, T(0));
    c.back() = coef;
    return UniPoly(std::move(c));
  }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int k) const { return k >= 0 && k <= degree() ? c_[static_cast<std::size_t>(k)] : T(0); }
  std::size_t term_count() const {
    return static_cast<std::size_t>(std::count_if(c_.begin(), c_.end(), [](const T& v) { return !detail::is_zero(v); }));
  }

  template <class X>
  X operator()(const X& x) const {
    X acc = X(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return UniPoly(std::move(c));
  }
  friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + b * T(-1); }
  friend UniPoly operator*(const UniPoly& a, const T& s) {
    std::vector<T> c(a.c_);
    for (auto& v : c) v *= s;
    return UniPoly(std::move(c));
  }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (detail::is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return UniPoly(std::move(c));
  }

  bool operator==(const UniPoly&) const = default;

 private:
  void trim() {
    while (!c_.empty() && detail::is_zero(c_.back())) c_.pop_back();
  }
  std::vector<T> c_;
};

/// Number of sign alternations in the sequence of nonzero coefficients.
/// By Descartes' rule this bounds the number of positive real roots.
template <class T>
int sign_changes(const UniPoly<T>& p) {
  int changes = 0, last = 0;
  for (const auto& c : p.coeffs()) {
    if (detail::is_zero(c)) continue;
    const int s = c > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

// ---------------------------------------------------------------------------
// FactoredUniPoly: scale * prod (x - root_i), evaluated without expansion.
// ---------------------------------------------------------------------------

struct FactoredUniPoly {
  double scale = 1.0;
  std::vector<double> roots;

  static constexpr int kMaxExpansionDegree = 64;

  int degree() const { return scale == 0.0 ? -1 : static_cast<int>(roots.size()); }

  double operator()(double x) const {
    double v = scale;
    for (double r : roots) v *= (x - r);
    return v;
  }

  /// Expanded coefficients; the roots are widened to T before multiplying.
  template <class T = double>
  UniPoly<T> expand() const {
    if (degree() > kMaxExpansionDegree) {
      throw PreconditionError("factored polynomial of degree " + std::to_string(degree()) +
                              " exceeds the expansion limit of 64");
    }
    std::vector<T> c{T(scale)};
    for (double r : roots) {
      std::vector<T> next(c.size() + 1, T(0));
      for (std::size_t i = 0; i < c.size(); ++i) {
        next[i + 1] += c[i];
        next[i] -= c[i] * T(r);
      }
      c = std::move(next);
    }
    return UniPoly<T>(std::move(c));
  }
};

// ---------------------------------------------------------------------------
// SparsePoly: multivariate, sorted unique exponent vectors, no zero terms.
// ---------------------------------------------------------------------------

template <class T = double>
class SparsePoly {
 public:
  struct Term {
    T coef;
    std::vector<Exponent> exps;
  };

  SparsePoly() : SparsePoly(1) {}
  explicit SparsePoly(int dim) : dim_(dim) {
    if (dim < 1) throw PreconditionError("polynomial dimension must be >= 1");
  }

  /// Builds from arbitrary terms; like exponents are merged and exact zeros dropped.
  SparsePoly(int dim, const std::vector<Term>& terms) : SparsePoly(dim) {
    std::map<std::vector<Exponent>, T> acc;
    for (const auto& t : terms) {
      if (static_cast<int>(t.exps.size()) != dim) throw PreconditionError("term exponent vector has wrong dimension");
      auto [it, inserted] = acc.try_emplace(t.exps, t.coef);
      if (!inserted) it->second += t.coef;
    }
    for (auto& [e, c] : acc) push_back_unchecked(c, e.data());
  }

  static SparsePoly constant(int dim, T value) {
    SparsePoly p(dim);
    if (!detail::is_zero(value)) {
      std::vector<Exponent> e(static_cast<std::size_t>(dim), 0);
      p.push_back_unchecked(value, e.data());
    }
    return p;
  }

  /// The coordinate function x_k.
  static SparsePoly variable(int dim, int k, T coef = T(1)) {
    SparsePoly p(dim);
    std::vector<Exponent> e(static_cast<std::size_t>(dim), 0);
    e[static_cast<std::size_t>(k)] = 1;
    p.push_back_unchecked(coef, e.data());
    return p;
  }

  /// sum_k a_k x_k + b
  static SparsePoly affine(const std::vector<T>& a, T b) {
    const int dim = static_cast<int>(a.size());
    std::vector<Term> terms;
    terms.push_back({b, std::vector<Exponent>(a.size(), 0)});
    for (int k = 0; k < dim; ++k) {
      std::vector<Exponent> e(a.size(), 0);
      e[static_cast<std::size_t>(k)] = 1;
      terms.push_back({a[static_cast<std::size_t>(k)], e});
    }
    return SparsePoly(dim, terms);
  }

  static SparsePoly from_uni(const UniPoly<T>& u) {
    SparsePoly p(1);
    for (int k = 0; k <= u.degree(); ++k) {
      const Exponent e = static_cast<Exponent>(k);
      if (!detail::is_zero(u.coeffs()[static_cast<std::size_t>(k)])) p.push_back_unchecked(u.coeffs()[static_cast<std::size_t>(k)], &e);
    }
    return p;
  }

  UniPoly<T> to_uni() const {
    if (dim_ != 1) throw PreconditionError("to_uni requires a univariate polynomial");
    if (coefs_.empty()) return {};
    std::vector<T> c(static_cast<std::size_t>(exps_.back()) + 1, T(0));
    for (std::size_t i = 0; i < coefs_.size(); ++i) c[exps_[i]] = coefs_[i];
    return UniPoly<T>(std::move(c));
  }

  int dim() const { return dim_; }
  std::size_t term_count() const { return coefs_.size(); }
  bool is_zero() const { return coefs_.empty(); }
  const T& coef(std::size_t i) const { return coefs_[i]; }
  const Exponent* exps(std::size_t i) const { return exps_.data() + i * static_cast<std::size_t>(dim_); }

  std::vector<Term> terms() const {
    std::vector<Term> out;
    out.reserve(coefs_.size());
    for (std::size_t i = 0; i < coefs_.size(); ++i) out.push_back({coefs_[i], {exps(i), exps(i) + dim_}});
    return out;
  }

  /// Maximum total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
      int s = 0;
      for (int k = 0; k < dim_; ++k) s += static_cast<int>(exps(i)[k]);
      d = std::max(d, s);
    }
    return d;
  }

  Exponent max_exponent(int k) const {
    Exponent m = 0;
    for (std::size_t i = 0; i < coefs_.size(); ++i) m = std::max(m, exps(i)[k]);
    return m;
  }

  /// Evaluates at a point given as `dim` consecutive values of type X.
  template <class X>
  X eval(const X* x) const {
    if (coefs_.empty()) return X(0);
    if (dim_ == 1) {
      // Sparse Horner over descending exponents.
      X acc = X(0);
      Exponent prev = exps_.back();
      for (std::size_t i = coefs_.size(); i-- > 0;) {
        const Exponent e = exps_[i];
        for (Exponent g = e; g < prev; ++g) acc *= x[0];
        acc += X(coefs_[i]);
        prev = e;
      }
      for (Exponent g = 0; g < prev; ++g) acc *= x[0];
      return acc;
    }
    std::vector<std::vector<X>> powers(static_cast<std::size_t>(dim_));
    for (int k = 0; k < dim_; ++k) {
      const Exponent m = max_exponent(k);
      auto& pk = powers[static_cast<std::size_t>(k)];
      pk.reserve(m + 1);
      pk.push_back(X(1));
      for (Exponent e = 1; e <= m; ++e) pk.push_back(pk.back() * x[k]);
    }
    X acc = X(0);
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
      X t = X(coefs_[i]);
      for (int k = 0; k < dim_; ++k) {
        const Exponent e = exps(i)[k];
        if (e) t *= powers[static_cast<std::size_t>(k)][e];
      }
      acc += t;
    }
    return acc;
  }

  template <class X>
  X eval(const std::vector<X>& x) const {
    if (static_cast<int>(x.size()) != dim_) {
      throw PreconditionError("point dimension " + std::to_string(x.size()) + " does not match polynomial dimension " +
                              std::to_string(dim_));
    }
    return eval(x.data());
  }

  T operator()(T x) const {
    if (dim_ != 1) throw PreconditionError("scalar evaluation requires a univariate polynomial");
    return eval(&x);
  }

  SparsePoly scaled(const T& s) const {
    SparsePoly out(dim_);
    if (detail::is_zero(s)) return out;
    out.exps_.reserve(exps_.size());
    out.coefs_.reserve(coefs_.size());
    for (std::size_t i = 0; i < coefs_.size(); ++i) {
      T c = coefs_[i] * s;
      if (!detail::is_zero(c)) out.push_back_unchecked(std::move(c), exps(i));
    }
    return out;
  }

  friend SparsePoly add(const SparsePoly& a, const SparsePoly& b, const ArithmeticLimits& lim = {}) {
    check_same_dim(a, b);
    SparsePoly out(a.dim_);
    out.coefs_.reserve(a.coefs_.size() + b.coefs_.size());
    std::size_t i = 0, j = 0;
    while (i < a.coefs_.size() || j < b.coefs_.size()) {
      int cmp;
      if (i == a.coefs_.size()) cmp = 1;
      else if (j == b.coefs_.size()) cmp = -1;
      else cmp = compare_exps(a.exps(i), b.exps(j), a.dim_);
      if (cmp < 0) {
        out.push_back_unchecked(a.coefs_[i], a.exps(i));
        ++i;
      } else if (cmp > 0) {
        out.push_back_unchecked(b.coefs_[j], b.exps(j));
        ++j;
      } else {
        T c = a.coefs_[i] + b.coefs_[j];
        if (!detail::is_zero(c)) out.push_back_unchecked(std::move(c), a.exps(i));
        ++i;
        ++j;
      }
    }
    out.check_cap(lim);
    return out;
  }

  friend SparsePoly mul(const SparsePoly& a, const SparsePoly& b, const ArithmeticLimits& lim = {}) {
    check_same_dim(a, b);
    const int d = a.dim_;
    SparsePoly out(d);
    if (a.is_zero() || b.is_zero()) return out;
    // Dense accumulation over the exponent box when it is not much bigger than
    // the number of term pairs; ordered map otherwise.
    std::vector<std::size_t> radix(static_cast<std::size_t>(d));
    double box = 1.0;
    for (int k = 0; k < d; ++k) {
      radix[static_cast<std::size_t>(k)] = static_cast<std::size_t>(a.max_exponent(k)) + b.max_exponent(k) + 1;
      box *= static_cast<double>(radix[static_cast<std::size_t>(k)]);
    }
    const double pairs = static_cast<double>(a.term_count()) * static_cast<double>(b.term_count());
    if (box <= std::max(8.0 * pairs, 4096.0) && box <= 2.0e7) {
      const auto nbox = static_cast<std::size_t>(box);
      std::vector<T> acc(nbox, T(0));
      std::vector<char> used(nbox, 0);
      auto index_of = [&](const Exponent* e) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * radix[static_cast<std::size_t>(k)] + e[k];
        return idx;
      };
      std::vector<std::size_t> ia(a.term_count()), ib(b.term_count());
      for (std::size_t i = 0; i < ia.size(); ++i) ia[i] = index_of(a.exps(i));
      for (std::size_t j = 0; j < ib.size(); ++j) ib[j] = index_of(b.exps(j));
      for (std::size_t i = 0; i < ia.size(); ++i) {
        const T& ca = a.coefs_[i];
        for (std::size_t j = 0; j < ib.size(); ++j) {
          const std::size_t k = ia[i] + ib[j];
          acc[k] += ca * b.coefs_[j];
          used[k] = 1;
        }
      }
      std::vector<Exponent> e(static_cast<std::size_t>(d));
      for (std::size_t idx = 0; idx < nbox; ++idx) {
        if (!used[idx] || detail::is_zero(acc[idx])) continue;
        std::size_t rem = idx;
        for (int k = d - 1; k >= 0; --k) {
          e[static_cast<std::size_t>(k)] = static_cast<Exponent>(rem % radix[static_cast<std::size_t>(k)]);
          rem /= radix[static_cast<std::size_t>(k)];
        }
        out.push_back_unchecked(std::move(acc[idx]), e.data());
      }
    } else {
      std::map<std::vector<Exponent>, T> acc;
      std::vector<Exponent> e(static_cast<std::size_t>(d));
      for (std::size_t i = 0; i < a.term_count(); ++i) {
        for (std::size_t j = 0; j < b.term_count(); ++j) {
          for (int k = 0; k < d; ++k) e[static_cast<std::size_t>(k)] = a.exps(i)[k] + b.exps(j)[k];
          auto [it, inserted] = acc.try_emplace(e, T(a.coefs_[i] * b.coefs_[j]));
          if (!inserted) it->second += a.coefs_[i] * b.coefs_[j];
        }
        if (acc.size() > lim.max_terms) break;
      }
      for (auto& [ex, c] : acc) {
        if (!detail::is_zero(c)) out.push_back_unchecked(c, ex.data());
      }
    }
    out.check_cap(lim);
    return out;
  }

  friend SparsePoly pow(const SparsePoly& p, unsigned k, const ArithmeticLimits& lim = {}) {
    SparsePoly result = constant(p.dim_, T(1));
    SparsePoly base = p;
    while (k) {
      if (k & 1U) result = mul(result, base, lim);
      k >>= 1U;
      if (k) base = mul(base, base, lim);
    }
    return result;
  }

  friend SparsePoly operator+(const SparsePoly& a, const SparsePoly& b) { return add(a, b); }
  friend SparsePoly operator-(const SparsePoly& a, const SparsePoly& b) { return add(a, b.scaled(T(-1))); }
  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) { return mul(a, b); }

  template <class U>
  SparsePoly<U> cast() const {
    SparsePoly<U> out(dim_);
    std::vector<typename SparsePoly<U>::Term> t;
    t.reserve(coefs_.size());
    for (std::size_t i = 0; i < coefs_.size(); ++i) t.push_back({static_cast<U>(coefs_[i]), {exps(i), exps(i) + dim_}});
    return SparsePoly<U>(dim_, t);
  }

  bool operator==(const SparsePoly& o) const { return dim_ == o.dim_ && exps_ == o.exps_ && coefs_ == o.coefs_; }

 private:
  static int compare_exps(const Exponent* a, const Exponent* b, int d) {
    for (int k = 0; k < d; ++k) {
      if (a[k] != b[k]) return a[k] < b[k] ? -1 : 1;
    }
    return 0;
  }
  static void check_same_dim(const SparsePoly& a, const SparsePoly& b) {
    if (a.dim_ != b.dim_) throw PreconditionError("polynomial dimensions differ");
  }
  void check_cap(const ArithmeticLimits& lim) const {
    if (coefs_.size() > lim.max_terms) {
      throw BlowupError("polynomial term count exceeds cap of " + std::to_string(lim.max_terms));
    }
  }
  void push_back_unchecked(T c, const Exponent* e) {
    coefs_.push_back(std::move(c));
    exps_.insert(exps_.end(), e, e + dim_);
  }

  int dim_ = 1;
  std::vector<Exponent> exps_;
  std::vector<T> coefs_;
};

// ---------------------------------------------------------------------------
// RationalFn
// ---------------------------------------------------------------------------

template <class T = double>
struct RationalFn {
  SparsePoly<T> num;
  SparsePoly<T> den;
  std::vector<Interval> domain;  // one per dimension

  RationalFn() : num(1), den(SparsePoly<T>::constant(1, T(1))), domain{Interval(-1.0, 1.0)} {}
  RationalFn(SparsePoly<T> n, SparsePoly<T> d, std::vector<Interval> dom)
      : num(std::move(n)), den(std::move(d)), domain(std::move(dom)) {
    if (num.dim() != den.dim()) throw PreconditionError("numerator and denominator dimensions differ");
    if (static_cast<int>(domain.size()) == 1 && num.dim() > 1) domain.assign(static_cast<std::size_t>(num.dim()), domain[0]);
    if (static_cast<int>(domain.size()) != num.dim()) throw PreconditionError("domain must list one interval per dimension");
    if (den.is_zero()) throw PreconditionError("denominator is the zero polynomial");
  }

  static RationalFn polynomial(SparsePoly<T> p, std::vector<Interval> dom) {
    const int d = p.dim();
    return RationalFn(std::move(p), SparsePoly<T>::constant(d, T(1)), std::move(dom));
  }

  int dim() const { return num.dim(); }
  int degree() const { return std::max(num.degree(), den.degree()); }
  std::size_t term_count() const { return num.term_count() + den.term_count(); }

  template <class X>
  X eval(const X* x) const {
    return num.eval(x) / den.eval(x);
  }
  template <class X>
  X eval(const std::vector<X>& x) const {
    return num.eval(x) / den.eval(x);
  }
  T operator()(T x) const { return num(x) / den(x); }

  template <class U>
  RationalFn<U> cast() const {
    return RationalFn<U>(num.template cast<U>(), den.template cast<U>(), domain);
  }
};

namespace detail {
inline void check_compatible_domains(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  if (a != b) throw PreconditionError("rational functions have different domains");
}
}  // namespace detail

/// p1/q1 + p2/q2 = (p1 q2 + p2 q1) / (q1 q2), unreduced.
template <class T>
RationalFn<T> rat_add(const RationalFn<T>& f, const RationalFn<T>& g, const ArithmeticLimits& lim = {}) {
  detail::check_compatible_domains(f.domain, g.domain);
  auto n = add(mul(f.num, g.den, lim), mul(g.num, f.den, lim), lim);
  auto d = mul(f.den, g.den, lim);
  return RationalFn<T>(std::move(n), std::move(d), f.domain);
}

template <class T>
RationalFn<T> rat_mul(const RationalFn<T>& f, const RationalFn<T>& g, const ArithmeticLimits& lim = {}) {
  detail::check_compatible_domains(f.domain, g.domain);
  return RationalFn<T>(mul(f.num, g.num, lim), mul(f.den, g.den, lim), f.domain);
}

template <class T>
RationalFn<T> rat_scale(const RationalFn<T>& f, const T& c) {
  return RationalFn<T>(f.num.scaled(c), f.den, f.domain);
}

/// R(f) for univariate R of degree r: numerator sum_j c_j p^j q^(r-j), denominator
/// sum_j d_j p^j q^(r-j), evaluated by homogeneous Horner.
template <class T>
RationalFn<T> rat_compose_uni(const RationalFn<T>& outer, const RationalFn<T>& f, const ArithmeticLimits& lim = {}) {
  if (outer.dim() != 1) throw PreconditionError("outer rational function must be univariate");
  const int r = outer.degree();
  const int d = f.dim();
  if (r <= 0) {
    // Constant outer function: value num(0)/den(0) carried as a ratio of constants.
    T zero(0);
    return RationalFn<T>(SparsePoly<T>::constant(d, outer.num.eval(&zero)), SparsePoly<T>::constant(d, outer.den.eval(&zero)),
                         f.domain);
  }
  const UniPoly<T> c = outer.num.to_uni();
  const UniPoly<T> dd = outer.den.to_uni();
  SparsePoly<T> hn = SparsePoly<T>::constant(d, c.coeff(r));
  SparsePoly<T> hd = SparsePoly<T>::constant(d, dd.coeff(r));
  SparsePoly<T> qpow = SparsePoly<T>::constant(d, T(1));
  for (int i = 1; i <= r; ++i) {
    qpow = mul(qpow, f.den, lim);
    hn = add(mul(hn, f.num, lim), qpow.scaled(c.coeff(r - i)), lim);
    hd = add(mul(hd, f.num, lim), qpow.scaled(dd.coeff(r - i)), lim);
  }
  return RationalFn<T>(std::move(hn), std::move(hd), f.domain);
}

/// Throws HypothesisError naming the first sample where den <= 0.
template <class T>
void check_positive_denominator(const RationalFn<T>& f, const BoxSamples& samples) {
  if (samples.dim != f.dim()) throw PreconditionError("sample dimension does not match rational function");
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < samples.count(); ++i) {
    std::copy(samples.point(i), samples.point(i) + f.dim(), x.begin());
    const double v = to_double(f.den.eval(x.data()));
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << "denominator not positive at x = (";
      for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
      os << "), value " << v;
      throw HypothesisError(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Level crossings of univariate rationals
// ---------------------------------------------------------------------------

struct CrossingReport {
  int crossings = 0;        // sign changes of num - level*den detected on the grid
  int descartes_bound = 0;  // sign_changes of the coefficient sequence of num - level*den
  std::size_t term_count = 0;
  std::vector<double> roots;
};

/// Counts sign crossings of g - level on `interval`. Tangential touches (no
/// sign change) do not count. Each bracketed crossing is refined by
/// bisection and roots closer than 1e-12 are merged.
template <class T>
CrossingReport crossings_at_level(const RationalFn<T>& g, double level, Interval interval, std::size_t grid_n) {
  if (g.dim() != 1) throw PreconditionError("crossings_at_level needs a univariate rational function");
  if (grid_n < 3) throw PreconditionError("crossing grid is too coarse (need at least 3 points)");
  const SparsePoly<T> h = add(g.num, g.den.scaled(T(-level)));
  CrossingReport rep;
  rep.term_count = g.term_count();
  rep.descartes_bound = sign_changes(h.to_uni());
  auto hv = [&](double x) { return to_double(h.eval(&x)); };
  Grid grid(interval, grid_n);
  int last_sign = 0;
  double last_x = grid[0];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = hv(grid[i]);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) {
      double a = last_x, b = grid[i];
      double fa = hv(a);
      while (b - a > 1e-12) {
        const double m = 0.5 * (a + b);
        const double fm = hv(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm > 0) == (fa > 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double root = 0.5 * (a + b);
      if (rep.roots.empty() || root - rep.roots.back() > 1e-12) rep.roots.push_back(root);
    }
    last_sign = s;
    last_x = grid[i];
  }
  rep.crossings = static_cast<int>(rep.roots.size());
  return rep;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using json = nlohmann::json;

template <class T>
json terms_to_json(const SparsePoly<T>& p) {
  json arr = json::array();
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    json e = json::array();
    for (int k = 0; k < p.dim(); ++k) e.push_back(p.exps(i)[k]);
    arr.push_back(json::array({to_double(p.coef(i)), e}));
  }
  return arr;
}

inline SparsePoly<double> terms_from_json(int dim, const json& arr) {
  std::vector<SparsePoly<double>::Term> terms;
  for (const auto& t : arr) {
    if (!t.is_array() || t.size() != 2) throw PreconditionError("term must be [coef, [exponents]]");
    SparsePoly<double>::Term term{t[0].get<double>(), {}};
    for (const auto& e : t[1]) {
      const auto v = e.get<long long>();
      if (v < 0) throw PreconditionError("negative exponent in polynomial document");
      term.exps.push_back(static_cast<Exponent>(v));
    }
    terms.push_back(std::move(term));
  }
  return SparsePoly<double>(dim, terms);
}

template <class T>
json to_json(const SparsePoly<T>& p) {
  return json{{"dim", p.dim()}, {"terms", terms_to_json(p)}};
}

template <class T>
json to_json(const RationalFn<T>& f) {
  json dom = json::array();
  for (const auto& iv : f.domain) dom.push_back(json::array({iv.lo, iv.hi}));
  return json{{"dim", f.dim()}, {"num", terms_to_json(f.num)}, {"den", terms_to_json(f.den)}, {"domain", dom}};
}

template <class T>
json to_json(const UniPoly<T>& u) {
  json c = json::array();
  for (const auto& v : u.coeffs()) c.push_back(to_double(v));
  return json{{"coeffs", c}};
}

inline UniPoly<double> unipoly_from_json(const json& j) { return UniPoly<double>(j.at("coeffs").get<std::vector<double>>()); }

inline std::vector<Interval> domain_from_json(const json& j, int dim) {
  std::vector<Interval> dom;
  if (j.contains("domain")) {
    for (const auto& iv : j.at("domain")) dom.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
  } else {
    dom.assign(static_cast<std::size_t>(dim), Interval(-1.0, 1.0));
  }
  return dom;
}

/// Accepts {"dim","num","den"} rational documents, {"dim","terms"} polynomial
/// documents (denominator 1), and univariate {"coeffs"} documents.
inline RationalFn<double> rational_from_json(const json& j) {
  if (j.contains("coeffs")) {
    auto p = SparsePoly<double>::from_uni(unipoly_from_json(j));
    return RationalFn<double>::polynomial(std::move(p), domain_from_json(j, 1));
  }
  const int dim = j.at("dim").get<int>();
  const json& num = j.contains("num") ? j.at("num") : j.at("terms");
  SparsePoly<double> n = terms_from_json(dim, num);
  SparsePoly<double> d = j.contains("den") ? terms_from_json(dim, j.at("den")) : SparsePoly<double>::constant(dim, 1.0);
  return RationalFn<double>(std::move(n), std::move(d), domain_from_json(j, dim));
}

inline SparsePoly<double> polynomial_from_json(const json& j) {
  RationalFn<double> f = rational_from_json(j);
  const auto one = SparsePoly<double>::constant(f.dim(), 1.0);
  if (!(f.den == one)) throw PreconditionError("expected a polynomial document (denominator must be 1)");
  return f.num;
}

/// Downcasts to double after rescaling numerator and denominator by a common
/// power of two so the largest coefficient magnitude is near 1. Terms that
/// underflow to zero are dropped.
template <class T>
RationalFn<double> downcast_rescaled(const RationalFn<T>& f) {
  using std::abs;
  using std::frexp;
  using boost::multiprecision::frexp;
  long long max_exp = std::numeric_limits<long long>::min();
  auto scan = [&](const SparsePoly<T>& p) {
    for (std::size_t i = 0; i < p.term_count(); ++i) {
      int e = 0;
      (void)frexp(T(p.coef(i)), &e);
      max_exp = std::max<long long>(max_exp, e);
    }
  };
  scan(f.num);
  scan(f.den);
  auto conv = [&](const SparsePoly<T>& p) {
    std::vector<SparsePoly<double>::Term> terms;
    for (std::size_t i = 0; i < p.term_count(); ++i) {
      T c = p.coef(i);
      using boost::multiprecision::ldexp;
      using std::ldexp;
      c = ldexp(c, static_cast<int>(-max_exp));
      const double v = static_cast<double>(c);
      if (v != 0.0) terms.push_back({v, {p.exps(i), p.exps(i) + p.dim()}});
    }
    return SparsePoly<double>(p.dim(), terms);
  };
  auto n = conv(f.num);
  auto d = conv(f.den);
  if (d.is_zero()) throw BlowupError("denominator underflowed during downcast");
  return RationalFn<double>(std::move(n), std::move(d), f.domain);
}

}  // namespace ratrelu
