#pragma once

// Scalars, intervals, evaluation grids, and the sup/L1 error metrics shared by
// every certification in the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

namespace ratrelu {

// ---------------------------------------------------------------------------
// Errors. The CLI maps each family onto an exit code.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is out of its documented range.
struct PreconditionError : Error {
  using Error::Error;
};

/// The object falls outside the class a construction is proven for (for
/// example an unnormalized network), so it refuses to run.
struct HypothesisError : Error {
  using Error::Error;
};

/// Representation size exceeded a configured cap.
struct BlowupError : Error {
  using Error::Error;
};

/// A function produced a non-finite value.
struct EvaluationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Extended precision
// ---------------------------------------------------------------------------

using Extended = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 128;

/// Mantissa bits for extended arithmetic: RATRELU_PRECISION if set, else 128.
inline unsigned precision_bits_from_env() {
  if (const char* env = std::getenv("RATRELU_PRECISION")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 24 && v <= (1L << 20)) {
      return static_cast<unsigned>(v);
    }
  }
  return kDefaultPrecisionBits;
}

inline unsigned bits_to_digits10(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

inline unsigned digits10_to_bits(unsigned digits) {
  return static_cast<unsigned>(std::ceil(digits / 0.30102999566398120));
}

/// Sets the default precision of newly created Extended values for the
/// lifetime of the guard.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits) : saved_(Extended::default_precision()) {
    Extended::default_precision(bits_to_digits10(bits));
  }
  ~ScopedPrecision() { Extended::default_precision(saved_); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_;
};

template <class T>
double to_double(const T& v) {
  return static_cast<double>(v);
}

// ---------------------------------------------------------------------------
// Intervals and grids
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      std::ostringstream os;
      os << "invalid interval [" << lo << ", " << hi << "]";
      throw PreconditionError(os.str());
    }
  }

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Uniform, endpoint-inclusive sample points.
class Grid {
 public:
  Grid(Interval interval, std::size_t n) : interval_(interval), points_(n) {
    if (n < 2) throw PreconditionError("grid needs at least 2 points");
    const double den = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      points_[i] = interval.lo + interval.width() * (static_cast<double>(i) / den);
    }
    points_.front() = interval.lo;
    points_.back() = interval.hi;
  }

  const Interval& interval() const { return interval_; }
  std::size_t size() const { return points_.size(); }
  double spacing() const { return interval_.width() / static_cast<double>(points_.size() - 1); }
  double operator[](std::size_t i) const { return points_[i]; }
  const std::vector<double>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  Interval interval_;
  std::vector<double> points_;
};

inline constexpr std::size_t kCertificationGridN = 100001;

/// Sample set over the cube [lo,hi]^d.
///   d == 1: uniform grid; d == 2: tensor grid of uniform grids;
///   d > 2: Halton points (bases 2,3,5,...) plus the cube corners.
struct BoxSamples {
  int dim = 1;
  Interval interval;
  std::size_t side = 0;       // per-axis count for tensor schemes, 0 otherwise
  std::vector<double> coords;  // row-major, dim entries per point
  std::string scheme;

  std::size_t count() const { return coords.size() / static_cast<std::size_t>(dim); }
  const double* point(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(dim); }
};

namespace detail {
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}
}  // namespace detail

/// `target` is the approximate total number of points.
inline BoxSamples make_box_samples(int dim, Interval interval, std::size_t target = kCertificationGridN) {
  if (dim < 1) throw PreconditionError("dimension must be >= 1");
  BoxSamples s;
  s.dim = dim;
  s.interval = interval;
  if (dim == 1) {
    Grid g(interval, std::max<std::size_t>(target, 2));
    s.side = g.size();
    s.coords = g.points();
    s.scheme = "uniform";
  } else if (dim == 2) {
    const auto side = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(target)))));
    Grid g(interval, side);
    s.side = side;
    s.coords.reserve(2 * side * side);
    for (std::size_t i = 0; i < side; ++i) {
      for (std::size_t j = 0; j < side; ++j) {
        s.coords.push_back(g[i]);
        s.coords.push_back(g[j]);
      }
    }
    s.scheme = "tensor";
  } else {
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim > 16) throw PreconditionError("low-discrepancy sampling supports d <= 16");
    const std::size_t corners = std::size_t{1} << dim;
    s.coords.reserve(static_cast<std::size_t>(dim) * (target + corners));
    for (std::size_t c = 0; c < corners; ++c) {
      for (int k = 0; k < dim; ++k) s.coords.push_back((c >> k) & 1U ? interval.hi : interval.lo);
    }
    for (std::size_t i = 1; i <= target; ++i) {
      for (int k = 0; k < dim; ++k) {
        s.coords.push_back(interval.lo + interval.width() * detail::radical_inverse(i, primes[k]));
      }
    }
    s.scheme = "halton";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Error metrics
// ---------------------------------------------------------------------------

struct ErrorReport {
  double sup_err = 0.0;
  double l1_err = 0.0;
  std::size_t grid_n = 0;
  Interval interval;
  double argmax = 0.0;              // first coordinate of the maximizing point
  std::vector<double> argmax_point;  // full maximizing point
  std::string scheme = "uniform";

  static std::string csv_header() { return "sup_err,l1_err,grid_n,lo,hi,argmax"; }

  std::string csv_row() const {
    std::ostringstream os;
    os << std::setprecision(12) << sup_err << ',' << l1_err << ',' << grid_n << ',' << interval.lo << ','
       << interval.hi << ',' << argmax;
    return os.str();
  }
};

/// Composite trapezoid rule over uniformly spaced samples.
inline double trapezoid(const std::vector<double>& values, double spacing) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * spacing;
}

namespace detail {
inline void check_finite(double v, const double* point, int dim, const char* which) {
  if (std::isfinite(v)) return;
  std::ostringstream os;
  os << "non-finite value of " << which << " at x = (";
  for (int k = 0; k < dim; ++k) os << (k ? ", " : "") << std::setprecision(17) << point[k];
  os << ")";
  throw EvaluationError(os.str());
}
}  // namespace detail

/// Compares two precomputed sample vectors on a 1-D grid.
inline ErrorReport compare_on_grid(const std::vector<double>& fv, const std::vector<double>& gv, const Grid& grid) {
  if (fv.size() != grid.size() || gv.size() != grid.size()) {
    throw PreconditionError("sample count does not match grid");
  }
  ErrorReport rep;
  rep.grid_n = grid.size();
  rep.interval = grid.interval();
  rep.argmax = grid[0];
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    detail::check_finite(fv[i], &grid.points()[i], 1, "f");
    detail::check_finite(gv[i], &grid.points()[i], 1, "g");
    diff[i] = std::abs(fv[i] - gv[i]);
    if (diff[i] > rep.sup_err) {
      rep.sup_err = diff[i];
      rep.argmax = grid[i];
    }
  }
  rep.argmax_point = {rep.argmax};
  rep.l1_err = trapezoid(diff, grid.spacing());
  return rep;
}

template <class F, class G>
ErrorReport sup_error(F&& f, G&& g, const Grid& grid) {
  std::vector<double> fv(grid.size()), gv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fv[i] = f(grid[i]);
    gv[i] = g(grid[i]);
  }
  return compare_on_grid(fv, gv, grid);
}

template <class F, class G>
double l1_error(F&& f, G&& g, const Grid& grid) {
  return sup_error(std::forward<F>(f), std::forward<G>(g), grid).l1_err;
}

/// Multi-dimensional comparison over a BoxSamples set. The L1 entry is a
/// tensor trapezoid for the tensor scheme and a sample mean times the volume
/// otherwise.
inline ErrorReport compare_on_samples(const std::vector<double>& fv, const std::vector<double>& gv,
                                      const BoxSamples& s) {
  const std::size_t n = s.count();
  if (fv.size() != n || gv.size() != n) throw PreconditionError("sample count does not match sample set");
  if (s.dim == 1) {
    Grid g(s.interval, n);
    return compare_on_grid(fv, gv, g);
  }
  ErrorReport rep;
  rep.grid_n = n;
  rep.interval = s.interval;
  rep.scheme = s.scheme;
  std::size_t best = 0;
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    detail::check_finite(fv[i], s.point(i), s.dim, "f");
    detail::check_finite(gv[i], s.point(i), s.dim, "g");
    diff[i] = std::abs(fv[i] - gv[i]);
    if (diff[i] > rep.sup_err) {
      rep.sup_err = diff[i];
      best = i;
    }
  }
  rep.argmax_point.assign(s.point(best), s.point(best) + s.dim);
  rep.argmax = rep.argmax_point[0];
  const double volume = std::pow(s.interval.width(), s.dim);
  if (s.scheme == "tensor") {
    const double h = s.interval.width() / static_cast<double>(s.side - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.side; ++i) {
      const double wi = (i == 0 || i + 1 == s.side) ? 0.5 : 1.0;
      for (std::size_t j = 0; j < s.side; ++j) {
        const double wj = (j == 0 || j + 1 == s.side) ? 0.5 : 1.0;
        acc += wi * wj * diff[i * s.side + j];
      }
    }
    rep.l1_err = acc * h * h;
  } else {
    double acc = 0.0;
    for (double d : diff) acc += d;
    rep.l1_err = volume * acc / static_cast<double>(n);
  }
  return rep;
}

}  // namespace ratrelu
