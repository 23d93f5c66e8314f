#pragma once

// Layered network IR: affine maps with ReLU, identity or rational activations.
// Large gadget networks are assembled as DAGs with NetBuilder and compiled
// into layers, inserting carry nodes for values consumed across layers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "ratrelu/algebra.hpp"
#include "ratrelu/newman.hpp"
#include "ratrelu/numcore.hpp"

namespace ratrelu {

enum class Activation { ReLU, Identity, Rational };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Identity: return "id";
    case Activation::Rational: return "rational";
  }
  return "?";
}

/// A univariate rational activation. When Newman parameters are present the
/// value is computed from the factored form; the explicit coefficients are
/// then only used by collapse and serialization (and may be absent for r > 64).
struct RationalActivation {
  std::optional<RationalFn<double>> fn;
  std::optional<NewmanParams> newman;

  static std::shared_ptr<const RationalActivation> from_newman(NewmanParams p) {
    auto a = std::make_shared<RationalActivation>();
    a->newman = p;
    if (p.r <= kMaxExplicitNewmanDegree) a->fn = newman_relu<double>(p.r, p.b).clipped;
    a->eval_ = std::make_shared<NewmanRelu>(p);
    return a;
  }

  static std::shared_ptr<const RationalActivation> from_rational(RationalFn<double> f) {
    if (f.dim() != 1) throw PreconditionError("rational activation must be univariate");
    auto a = std::make_shared<RationalActivation>();
    a->fn = std::move(f);
    return a;
  }

  int degree() const {
    if (newman) return newman->r;
    return fn ? fn->degree() : 0;
  }

  double operator()(double z) const {
    if (eval_) return (*eval_)(z);
    return (*fn)(z);
  }

 private:
  std::shared_ptr<const NewmanRelu> eval_;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Layer {
  SparseMatrix w;  // out_dim x in_dim
  Eigen::VectorXd b;
  Activation act = Activation::ReLU;
  std::shared_ptr<const RationalActivation> rational;

  int in_dim() const { return static_cast<int>(w.cols()); }
  int out_dim() const { return static_cast<int>(w.rows()); }

  static Layer dense(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, Activation act) {
    if (w.rows() != b.size()) throw PreconditionError("layer bias length does not match weight rows");
    Layer l;
    l.w = w.sparseView(0.0, 0.0);
    l.w.makeCompressed();
    l.b = b;
    l.act = act;
    return l;
  }

  double apply(double z) const {
    switch (act) {
      case Activation::ReLU: return z > 0.0 ? z : 0.0;
      case Activation::Identity: return z;
      case Activation::Rational: return (*rational)(z);
    }
    return z;
  }
};

class ReluNet {
 public:
  ReluNet() = default;
  ReluNet(int in_dim, std::vector<Layer> layers) : in_dim_(in_dim), layers_(std::move(layers)) { validate(); }

  /// The constant-zero scalar network.
  static ReluNet zero(int in_dim) {
    Layer l;
    l.w = SparseMatrix(1, in_dim);
    l.b = Eigen::VectorXd::Zero(1);
    l.act = Activation::Identity;
    return ReluNet(in_dim, {std::move(l)});
  }

  int in_dim() const { return in_dim_; }
  int out_dim() const { return layers_.empty() ? in_dim_ : layers_.back().out_dim(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  /// Total number of layers including an identity output layer.
  int depth() const { return static_cast<int>(layers_.size()); }
  /// Number of nonlinear (ReLU or rational) layers.
  int activation_depth() const {
    int l = 0;
    for (const auto& layer : layers_) l += layer.act != Activation::Identity;
    return l;
  }
  /// Max width over nonlinear layers.
  int activation_width() const {
    int m = 0;
    for (const auto& layer : layers_) {
      if (layer.act != Activation::Identity) m = std::max(m, layer.out_dim());
    }
    return m;
  }
  int width() const {
    int m = 0;
    for (const auto& layer : layers_) m = std::max(m, layer.out_dim());
    return m;
  }
  /// Number of nodes over all layers.
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.out_dim());
    return n;
  }
  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.w.nonZeros());
    return n;
  }
  bool has_identity_output() const { return !layers_.empty() && layers_.back().act == Activation::Identity; }

  std::vector<double> eval_all(const double* x) const {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x, in_dim_);
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const Layer& layer = layers_[li];
      Eigen::VectorXd z = layer.w * v + layer.b;
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = layer.apply(z[i]);
      if (!z.allFinite()) throw EvaluationError(nonfinite_message(x, li));
      v = std::move(z);
    }
    return {v.data(), v.data() + v.size()};
  }

  double eval(const double* x) const {
    if (out_dim() != 1) throw PreconditionError("scalar evaluation of a multi-output network");
    return eval_all(x)[0];
  }
  double eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != in_dim_) {
      throw PreconditionError("point dimension " + std::to_string(x.size()) + " does not match network input " +
                              std::to_string(in_dim_));
    }
    return eval(x.data());
  }
  double operator()(double x) const {
    if (in_dim_ != 1) throw PreconditionError("scalar-argument evaluation needs a one-input network");
    return eval(&x);
  }

  /// Evaluates output `out` at every point of a row-major coordinate array.
  std::vector<double> eval_batch(const std::vector<double>& coords, int out = 0) const {
    const std::size_t n = coords.size() / static_cast<std::size_t>(in_dim_);
    std::vector<double> result(n);
    // Points run down the columns so every weight is one contiguous axpy.
    constexpr std::size_t kChunk = 64;
    Eigen::MatrixXd v, z;
    for (std::size_t start = 0; start < n; start += kChunk) {
      const std::size_t cnt = std::min(kChunk, n - start);
      const auto rows = static_cast<Eigen::Index>(cnt);
      v = Eigen::Map<const Eigen::MatrixXd>(coords.data() + start * static_cast<std::size_t>(in_dim_), in_dim_, rows).transpose();
      for (std::size_t li = 0; li < layers_.size(); ++li) {
        const Layer& layer = layers_[li];
        z.resize(rows, layer.out_dim());
        for (Eigen::Index r = 0; r < layer.out_dim(); ++r) {
          auto col = z.col(r);
          col.setZero();
          for (SparseMatrix::InnerIterator it(layer.w, r); it; ++it) col += it.value() * v.col(it.col());
          col.array() += layer.b[r];  // bias last, as in eval_all
        }
        if (layer.act == Activation::ReLU) {
          z = z.cwiseMax(0.0);
        } else if (layer.act == Activation::Rational) {
          z = z.unaryExpr([&](double t) { return (*layer.rational)(t); });
        }
        if (!z.allFinite()) {
          for (Eigen::Index c = 0; c < rows; ++c) {
            if (!z.row(c).allFinite()) {
              throw EvaluationError(nonfinite_message(coords.data() + (start + static_cast<std::size_t>(c)) * in_dim_, li));
            }
          }
        }
        std::swap(v, z);
      }
      for (std::size_t c = 0; c < cnt; ++c) result[start + c] = v(static_cast<Eigen::Index>(c), out);
    }
    return result;
  }

  std::vector<double> eval_grid(const Grid& g) const {
    if (in_dim_ != 1) throw PreconditionError("grid evaluation needs a one-input network");
    return eval_batch(g.points());
  }

 private:
  void validate() const {
    if (in_dim_ < 1) throw PreconditionError("network input dimension must be >= 1");
    int prev = in_dim_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const Layer& l = layers_[i];
      if (l.in_dim() != prev) {
        throw PreconditionError("layer " + std::to_string(i) + " expects input dimension " + std::to_string(l.in_dim()) +
                                " but receives " + std::to_string(prev));
      }
      if (l.b.size() != l.out_dim()) throw PreconditionError("layer " + std::to_string(i) + " bias length mismatch");
      if (l.act == Activation::Rational && !l.rational) throw PreconditionError("rational layer without an activation");
      prev = l.out_dim();
    }
  }

  std::string nonfinite_message(const double* x, std::size_t layer) const {
    std::ostringstream os;
    os << "non-finite value in layer " << layer << " at x = (";
    for (int k = 0; k < in_dim_; ++k) os << (k ? ", " : "") << x[k];
    os << ")";
    return os.str();
  }

  int in_dim_ = 1;
  std::vector<Layer> layers_;
};

// ---------------------------------------------------------------------------
// Constraint audit: ||a||_1 + |b| <= 1 per node
// ---------------------------------------------------------------------------

struct NodeVerdict {
  int layer = 0;
  int node = 0;
  double norm = 0.0;  // ||a||_1 + |b|
  bool ok = true;
};

struct ConstraintReport {
  std::vector<NodeVerdict> nodes;
  bool ok = true;

  std::string violations() const {
    std::ostringstream os;
    for (const auto& v : nodes) {
      if (!v.ok) os << "layer " << v.layer << " node " << v.node << ": ||a||_1 + |b| = " << v.norm << " > 1\n";
    }
    return os.str();
  }
};

inline constexpr double kConstraintSlack = 1e-12;

inline ConstraintReport check_constraints(const ReluNet& net) {
  ConstraintReport rep;
  for (int li = 0; li < net.depth(); ++li) {
    const Layer& l = net.layers()[static_cast<std::size_t>(li)];
    for (int r = 0; r < l.out_dim(); ++r) {
      double s = std::abs(l.b[r]);
      for (SparseMatrix::InnerIterator it(l.w, r); it; ++it) s += std::abs(it.value());
      NodeVerdict v{li, r, s, s <= 1.0 + kConstraintSlack};
      rep.ok = rep.ok && v.ok;
      rep.nodes.push_back(v);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// NetBuilder
// ---------------------------------------------------------------------------

/// Affine combination of builder nodes.
struct Lin {
  std::vector<std::pair<int, double>> terms;
  double bias = 0.0;

  Lin() = default;
  explicit Lin(double c) : bias(c) {}

  friend Lin operator+(Lin a, const Lin& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    a.bias += b.bias;
    return a;
  }
  friend Lin operator*(double s, Lin a) {
    for (auto& t : a.terms) t.second *= s;
    a.bias *= s;
    return a;
  }
  friend Lin operator-(const Lin& a, const Lin& b) { return a + (-1.0) * b; }
  friend Lin operator+(Lin a, double c) {
    a.bias += c;
    return a;
  }
  friend Lin operator-(Lin a, double c) {
    a.bias -= c;
    return a;
  }
  friend Lin operator-(double c, const Lin& a) { return (-1.0) * a + c; }
};

class NetBuilder {
 public:
  /// With `nonnegative_inputs`, raw inputs are carried across layers by a
  /// single ReLU node each (exact only for inputs >= 0); otherwise a pair.
  explicit NetBuilder(int in_dim, bool nonnegative_inputs = false) : in_dim_(in_dim), nonneg_(nonnegative_inputs) {
    if (in_dim < 1) throw PreconditionError("builder input dimension must be >= 1");
    level_.assign(static_cast<std::size_t>(in_dim), 0);
    defs_.resize(static_cast<std::size_t>(in_dim));
  }

  int in_dim() const { return in_dim_; }
  std::size_t relu_count() const { return level_.size() - static_cast<std::size_t>(in_dim_); }

  Lin input(int k) const {
    Lin l;
    l.terms.push_back({k, 1.0});
    return l;
  }

  static Lin node(int id) {
    Lin l;
    l.terms.push_back({id, 1.0});
    return l;
  }

  int relu_id(const Lin& z) {
    Lin c = canonical(z);
    int lvl = 0;
    for (const auto& [id, w] : c.terms) lvl = std::max(lvl, level_[static_cast<std::size_t>(id)]);
    defs_.push_back(std::move(c));
    level_.push_back(lvl + 1);
    return static_cast<int>(level_.size()) - 1;
  }

  Lin relu(const Lin& z) { return node(relu_id(z)); }

  /// Level of the deepest node in `z` (0 for inputs and constants).
  int level(const Lin& z) const {
    int lvl = 0;
    for (const auto& [id, w] : z.terms) lvl = std::max(lvl, level_[static_cast<std::size_t>(id)]);
    return lvl;
  }

  /// Feeds `inputs` through an existing ReLU/identity network.
  std::vector<Lin> append(const ReluNet& net, const std::vector<Lin>& inputs) {
    if (static_cast<int>(inputs.size()) != net.in_dim()) throw PreconditionError("append: input count mismatch");
    std::vector<Lin> prev = inputs;
    for (const auto& layer : net.layers()) {
      if (layer.act == Activation::Rational) throw PreconditionError("builder cannot import rational layers");
      std::vector<Lin> next;
      next.reserve(static_cast<std::size_t>(layer.out_dim()));
      for (int r = 0; r < layer.out_dim(); ++r) {
        Lin z(layer.b[r]);
        for (SparseMatrix::InnerIterator it(layer.w, r); it; ++it) {
          z = z + it.value() * prev[static_cast<std::size_t>(it.col())];
        }
        next.push_back(layer.act == Activation::ReLU ? relu(z) : canonical(z));
      }
      prev = std::move(next);
    }
    return prev;
  }

  /// Direct DAG evaluation, independent of the layered compilation.
  double evaluate(const Lin& z, const double* x) const {
    std::vector<double> memo(level_.size(), std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < in_dim_; ++k) memo[static_cast<std::size_t>(k)] = x[k];
    // Definitions only reference earlier ids, so one forward sweep suffices.
    for (std::size_t id = static_cast<std::size_t>(in_dim_); id < level_.size(); ++id) {
      double v = defs_[id].bias;
      for (const auto& [j, w] : defs_[id].terms) v += w * memo[static_cast<std::size_t>(j)];
      memo[id] = v > 0.0 ? v : 0.0;
    }
    double v = z.bias;
    for (const auto& [j, w] : z.terms) v += w * memo[static_cast<std::size_t>(j)];
    return v;
  }

  ReluNet compile(const Lin& output) const { return compile(std::vector<Lin>{output}); }

  ReluNet compile(const std::vector<Lin>& outputs_in) const {
    std::vector<Lin> outputs;
    for (const auto& o : outputs_in) outputs.push_back(canonical(o));
    const std::size_t n = level_.size();

    // Reachability from the outputs.
    std::vector<char> live(n, 0);
    std::vector<int> stack;
    for (const auto& o : outputs) {
      for (const auto& [id, w] : o.terms) stack.push_back(id);
    }
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      if (live[static_cast<std::size_t>(id)]) continue;
      live[static_cast<std::size_t>(id)] = 1;
      for (const auto& [j, w] : defs_[static_cast<std::size_t>(id)].terms) stack.push_back(j);
    }

    const bool relu_terminal = outputs.size() == 1 && outputs[0].terms.size() == 1 && outputs[0].bias == 0.0 &&
                               outputs[0].terms[0].second == 1.0 && outputs[0].terms[0].first >= in_dim_;
    int top = 0;
    for (const auto& o : outputs) top = std::max(top, level(o));

    // Last level at which each node's value must be available.
    std::vector<int> need(n, -1);
    for (std::size_t id = 0; id < n; ++id) {
      if (!live[id]) continue;
      for (const auto& [j, w] : defs_[id].terms) need[static_cast<std::size_t>(j)] = std::max(need[static_cast<std::size_t>(j)], level_[id] - 1);
    }
    if (relu_terminal) {
      need[static_cast<std::size_t>(outputs[0].terms[0].first)] = top;
    } else {
      for (const auto& o : outputs) {
        for (const auto& [j, w] : o.terms) need[static_cast<std::size_t>(j)] = std::max(need[static_cast<std::size_t>(j)], top);
      }
    }

    // Slot assignment: slot[l][id] is the first row in layer l holding node id.
    std::vector<std::unordered_map<int, int>> slot(static_cast<std::size_t>(top) + 1);
    std::vector<int> rows(static_cast<std::size_t>(top) + 1, 0);
    for (int lvl = 1; lvl <= top; ++lvl) {
      auto& s = slot[static_cast<std::size_t>(lvl)];
      int& cnt = rows[static_cast<std::size_t>(lvl)];
      for (std::size_t id = 0; id < n; ++id) {
        if (!live[id]) continue;
        const int own = level_[id];
        if (own == lvl || (own < lvl && need[id] >= lvl)) {
          s[static_cast<int>(id)] = cnt;
          cnt += (own == 0 && !nonneg_) ? 2 : 1;
        }
      }
    }

    using Trip = Eigen::Triplet<double>;
    // Representation of node id at layer lvl as weighted rows of that layer.
    auto emit = [&](std::vector<Trip>& trips, int row, int id, double w, int lvl) {
      if (lvl == 0) {
        trips.emplace_back(row, id, w);
        return;
      }
      const int base = slot[static_cast<std::size_t>(lvl)].at(id);
      trips.emplace_back(row, base, w);
      if (level_[static_cast<std::size_t>(id)] == 0 && !nonneg_) trips.emplace_back(row, base + 1, -w);
    };

    std::vector<Layer> layers;
    for (int lvl = 1; lvl <= top; ++lvl) {
      const int prev_rows = lvl == 1 ? in_dim_ : rows[static_cast<std::size_t>(lvl) - 1];
      std::vector<Trip> trips;
      Eigen::VectorXd b = Eigen::VectorXd::Zero(rows[static_cast<std::size_t>(lvl)]);
      for (const auto& [id, row] : slot[static_cast<std::size_t>(lvl)]) {
        const int own = level_[static_cast<std::size_t>(id)];
        if (own == lvl) {
          const Lin& d = defs_[static_cast<std::size_t>(id)];
          for (const auto& [j, w] : d.terms) emit(trips, row, j, w, lvl - 1);
          b[row] = d.bias;
        } else if (own == 0 && !nonneg_) {
          emit(trips, row, id, 1.0, lvl - 1);
          emit(trips, row + 1, id, -1.0, lvl - 1);
        } else {
          emit(trips, row, id, 1.0, lvl - 1);
        }
      }
      Layer layer;
      layer.w = SparseMatrix(rows[static_cast<std::size_t>(lvl)], prev_rows);
      layer.w.setFromTriplets(trips.begin(), trips.end());
      layer.w.makeCompressed();
      layer.b = std::move(b);
      layer.act = Activation::ReLU;
      layers.push_back(std::move(layer));
    }
    if (!relu_terminal) {
      const int prev_rows = top == 0 ? in_dim_ : rows[static_cast<std::size_t>(top)];
      std::vector<Trip> trips;
      Eigen::VectorXd b(static_cast<Eigen::Index>(outputs.size()));
      for (std::size_t o = 0; o < outputs.size(); ++o) {
        for (const auto& [j, w] : outputs[o].terms) emit(trips, static_cast<int>(o), j, w, top);
        b[static_cast<Eigen::Index>(o)] = outputs[o].bias;
      }
      Layer layer;
      layer.w = SparseMatrix(static_cast<Eigen::Index>(outputs.size()), prev_rows);
      layer.w.setFromTriplets(trips.begin(), trips.end());
      layer.w.makeCompressed();
      layer.b = std::move(b);
      layer.act = Activation::Identity;
      layers.push_back(std::move(layer));
    }
    return ReluNet(in_dim_, std::move(layers));
  }

 private:
  Lin canonical(const Lin& z) const {
    std::vector<std::pair<int, double>> t = z.terms;
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Lin out(z.bias);
    for (const auto& [id, w] : t) {
      if (id < 0 || static_cast<std::size_t>(id) >= level_.size()) throw PreconditionError("builder: unknown node id");
      if (!out.terms.empty() && out.terms.back().first == id) out.terms.back().second += w;
      else out.terms.push_back({id, w});
    }
    std::erase_if(out.terms, [](const auto& p) { return p.second == 0.0; });
    return out;
  }

  int in_dim_;
  bool nonneg_;
  std::vector<int> level_;
  std::vector<Lin> defs_;
};

// ---------------------------------------------------------------------------
// Composition helpers
// ---------------------------------------------------------------------------

/// second(first(x)); first must have as many outputs as second has inputs.
inline ReluNet serial(const ReluNet& first, const ReluNet& second) {
  NetBuilder nb(first.in_dim());
  std::vector<Lin> xs;
  for (int k = 0; k < first.in_dim(); ++k) xs.push_back(nb.input(k));
  auto mid = nb.append(first, xs);
  return nb.compile(nb.append(second, mid));
}

/// Side-by-side union sharing the input; outputs are concatenated.
inline ReluNet parallel(const std::vector<ReluNet>& nets) {
  if (nets.empty()) throw PreconditionError("parallel: no networks");
  NetBuilder nb(nets.front().in_dim());
  std::vector<Lin> xs;
  for (int k = 0; k < nb.in_dim(); ++k) xs.push_back(nb.input(k));
  std::vector<Lin> outs;
  for (const auto& n : nets) {
    auto o = nb.append(n, xs);
    outs.insert(outs.end(), o.begin(), o.end());
  }
  return nb.compile(outs);
}

/// sum_i c_i net_i(x) + bias for scalar-output nets.
inline ReluNet affine_join(const std::vector<ReluNet>& nets, const std::vector<double>& coefs, double bias) {
  if (nets.empty() || nets.size() != coefs.size()) throw PreconditionError("affine_join: size mismatch");
  NetBuilder nb(nets.front().in_dim());
  std::vector<Lin> xs;
  for (int k = 0; k < nb.in_dim(); ++k) xs.push_back(nb.input(k));
  Lin out(bias);
  for (std::size_t i = 0; i < nets.size(); ++i) out = out + coefs[i] * nb.append(nets[i], xs).at(0);
  return nb.compile(out);
}

// ---------------------------------------------------------------------------
// Canonical targets
// ---------------------------------------------------------------------------

/// Δ on the real line, as σ(2σ(x) − 4σ(x − 1/2)).
inline double triangle(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x <= 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
}

inline double triangle_power(int k, double x) {
  for (int i = 0; i < k; ++i) x = triangle(x);
  return x;
}

/// Δ^k: 2k layers of width at most 2.
inline ReluNet build_triangle(int k) {
  if (k < 1) throw PreconditionError("build_triangle needs k >= 1");
  std::vector<Layer> layers;
  for (int i = 0; i < k; ++i) {
    Eigen::MatrixXd w1(2, 1);
    w1 << 1.0, 1.0;
    Eigen::VectorXd b1(2);
    b1 << 0.0, -0.5;
    layers.push_back(Layer::dense(w1, b1, Activation::ReLU));
    Eigen::MatrixXd w2(1, 2);
    w2 << 2.0, -4.0;
    layers.push_back(Layer::dense(w2, Eigen::VectorXd::Zero(1), Activation::ReLU));
  }
  return ReluNet(1, std::move(layers));
}

/// 1/x on [1/4, 1], 0 elsewhere.
inline double spike(double x) { return x >= 0.25 && x <= 1.0 ? 1.0 / x : 0.0; }

inline std::function<double(double)> build_spike() { return spike; }

/// min(max(v, 0), 1) applied to the scalar output.
inline ReluNet clip01(const ReluNet& net) {
  if (net.out_dim() != 1) throw PreconditionError("clip01 needs a scalar-output network");
  std::vector<Layer> layers = net.layers();
  Layer two;
  if (!layers.empty() && layers.back().act == Activation::Identity) {
    const Layer last = layers.back();
    layers.pop_back();
    std::vector<Eigen::Triplet<double>> t;
    for (SparseMatrix::InnerIterator it(last.w, 0); it; ++it) {
      t.emplace_back(0, static_cast<int>(it.col()), it.value());
      t.emplace_back(1, static_cast<int>(it.col()), it.value());
    }
    two.w = SparseMatrix(2, last.in_dim());
    two.w.setFromTriplets(t.begin(), t.end());
    two.b = Eigen::VectorXd(2);
    two.b << last.b[0], last.b[0] - 1.0;
  } else {
    const int in = net.out_dim();
    std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {1, 0, 1.0}};
    two.w = SparseMatrix(2, in);
    two.w.setFromTriplets(t.begin(), t.end());
    two.b = Eigen::VectorXd(2);
    two.b << 0.0, -1.0;
  }
  two.w.makeCompressed();
  two.act = Activation::ReLU;
  layers.push_back(std::move(two));
  Eigen::MatrixXd w(1, 2);
  w << 1.0, -1.0;
  layers.push_back(Layer::dense(w, Eigen::VectorXd::Zero(1), Activation::Identity));
  return ReluNet(net.in_dim(), std::move(layers));
}

// ---------------------------------------------------------------------------
// Exact piecewise-linear extraction for one-input networks
// ---------------------------------------------------------------------------

struct PiecewiseLinear {
  Interval domain;
  std::vector<double> knots;   // domain.lo, breakpoints..., domain.hi
  std::vector<double> values;  // function values at knots

  std::size_t pieces() const { return knots.size() - 1; }
  std::vector<double> breakpoints() const { return {knots.begin() + 1, knots.end() - 1}; }
  double slope(std::size_t i) const { return (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]); }
  double intercept(std::size_t i) const { return values[i] - slope(i) * knots[i]; }

  double operator()(double x) const {
    if (x <= knots.front()) return values.front() + slope(0) * (x - knots.front());
    if (x >= knots.back()) return values.back() + slope(pieces() - 1) * (x - knots.back());
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double t = (x - knots[i]) / (knots[i + 1] - knots[i]);
    return values[i] + t * (values[i + 1] - values[i]);
  }
};

inline constexpr std::size_t kBreakpointCap = 1'000'000;
inline constexpr double kBreakpointDedup = 1e-12;

/// Propagates breakpoints layer by layer: within each current piece every
/// node is affine, so a ReLU adds a breakpoint exactly where its
/// pre-activation changes sign. Adjacent collinear pieces of the output are
/// merged.
inline PiecewiseLinear enumerate_pieces(const ReluNet& net, Interval interval, std::size_t cap = kBreakpointCap) {
  if (net.in_dim() != 1) throw PreconditionError("enumerate_pieces needs a one-input network");
  if (net.out_dim() != 1) throw PreconditionError("enumerate_pieces needs a scalar-output network");
  std::vector<double> knots{interval.lo, interval.hi};
  // vals(node, knot)
  Eigen::MatrixXd vals(1, 2);
  vals << interval.lo, interval.hi;
  for (const auto& layer : net.layers()) {
    if (layer.act == Activation::Rational) throw PreconditionError("enumerate_pieces: rational activations are not piecewise linear");
    Eigen::MatrixXd z = layer.w * vals;
    z.colwise() += layer.b;
    std::vector<double> extra;
    if (layer.act == Activation::ReLU) {
      for (Eigen::Index r = 0; r < z.rows(); ++r) {
        for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
          const double a = z(r, static_cast<Eigen::Index>(j)), b = z(r, static_cast<Eigen::Index>(j) + 1);
          if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
            const double t = a / (a - b);
            extra.push_back(knots[j] + t * (knots[j + 1] - knots[j]));
          }
        }
      }
    }
    if (!extra.empty()) {
      std::vector<double> merged = knots;
      merged.insert(merged.end(), extra.begin(), extra.end());
      std::sort(merged.begin(), merged.end());
      std::vector<double> uniq;
      for (double x : merged) {
        if (uniq.empty() || x - uniq.back() > kBreakpointDedup) uniq.push_back(x);
      }
      uniq.back() = interval.hi;
      if (uniq.size() > cap + 1) {
        throw BlowupError("breakpoint count exceeds cap of " + std::to_string(cap));
      }
      // Interpolate the (affine-on-old-pieces) pre-activations at the new knots.
      Eigen::MatrixXd nz(z.rows(), static_cast<Eigen::Index>(uniq.size()));
      std::size_t j = 0;
      for (std::size_t i = 0; i < uniq.size(); ++i) {
        while (j + 2 < knots.size() && knots[j + 1] < uniq[i]) ++j;
        const double t = (uniq[i] - knots[j]) / (knots[j + 1] - knots[j]);
        nz.col(static_cast<Eigen::Index>(i)) =
            (1.0 - t) * z.col(static_cast<Eigen::Index>(j)) + t * z.col(static_cast<Eigen::Index>(j) + 1);
      }
      // Snap values at the inserted sign changes to exactly zero where applicable.
      z = std::move(nz);
      knots = std::move(uniq);
    }
    if (layer.act == Activation::ReLU) z = z.cwiseMax(0.0);
    vals = std::move(z);
  }
  PiecewiseLinear pl;
  pl.domain = interval;
  pl.knots.push_back(knots.front());
  pl.values.push_back(vals(0, 0));
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double y = vals(0, static_cast<Eigen::Index>(i));
    if (i + 1 < knots.size() && pl.knots.size() >= 1) {
      // Drop knot i if it is collinear with its neighbours.
      const double x0 = pl.knots.back(), y0 = pl.values.back();
      const double x2 = knots[i + 1], y2 = vals(0, static_cast<Eigen::Index>(i) + 1);
      const double s1 = (y - y0) / (knots[i] - x0), s2 = (y2 - y) / (x2 - knots[i]);
      if (std::abs(s1 - s2) <= 1e-9 * std::max({1.0, std::abs(s1), std::abs(s2)})) continue;
    }
    pl.knots.push_back(knots[i]);
    pl.values.push_back(y);
  }
  return pl;
}

// ---------------------------------------------------------------------------
// Random networks
// ---------------------------------------------------------------------------

/// Platform-independent uniform draw in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// All-ReLU network with the given layer widths; every node's row is drawn
/// uniformly in [-1,1] and rescaled so that ||a||_1 + |b| = `row_norm`.
inline ReluNet random_constrained_net(int in_dim, const std::vector<int>& widths, std::mt19937_64& rng, double row_norm = 1.0) {
  std::vector<Layer> layers;
  int prev = in_dim;
  for (int w : widths) {
    Eigen::MatrixXd a(w, prev);
    Eigen::VectorXd b(w);
    for (int r = 0; r < w; ++r) {
      double s = 0.0;
      for (int c = 0; c < prev; ++c) {
        a(r, c) = uniform(rng, -1.0, 1.0);
        s += std::abs(a(r, c));
      }
      b[r] = uniform(rng, -1.0, 1.0);
      s += std::abs(b[r]);
      const double scale = row_norm * uniform(rng, 0.5, 1.0) / s;
      a.row(r) *= scale;
      b[r] *= scale;
    }
    layers.push_back(Layer::dense(a, b, Activation::ReLU));
    prev = w;
  }
  return ReluNet(in_dim, std::move(layers));
}

/// ReLU hidden layers with weights in [-scale, scale] and an identity output.
inline ReluNet random_relu_net(int in_dim, const std::vector<int>& widths, std::mt19937_64& rng, double scale = 2.0) {
  std::vector<Layer> layers;
  int prev = in_dim;
  auto draw = [&](int rows, int cols, Activation act) {
    Eigen::MatrixXd a(rows, cols);
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) a(r, c) = uniform(rng, -scale, scale);
      b[r] = uniform(rng, -scale, scale);
    }
    layers.push_back(Layer::dense(a, b, act));
  };
  for (int w : widths) {
    draw(w, prev, Activation::ReLU);
    prev = w;
  }
  draw(1, prev, Activation::Identity);
  return ReluNet(in_dim, std::move(layers));
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace detail {
inline json rational_activation_to_json(const RationalActivation& a) {
  json j = json::object();
  if (a.fn) j = to_json(*a.fn);
  if (a.newman) j["newman"] = json{{"r", a.newman->r}, {"b", a.newman->b}};
  return j;
}
}  // namespace detail

/// Dense "w" for small layers; larger sparse layers use "w_sparse":
/// [[row, col, value], ...] with "rows"/"cols".
inline json net_to_json(const ReluNet& net) {
  json layers = json::array();
  for (const auto& l : net.layers()) {
    json jl;
    const double cells = static_cast<double>(l.out_dim()) * l.in_dim();
    if (cells <= 4096 || static_cast<double>(l.w.nonZeros()) > 0.25 * cells) {
      const Eigen::MatrixXd d(l.w);
      json w = json::array();
      for (Eigen::Index r = 0; r < d.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < d.cols(); ++c) row.push_back(d(r, c));
        w.push_back(row);
      }
      jl["w"] = w;
    } else {
      json w = json::array();
      for (Eigen::Index r = 0; r < l.w.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(l.w, r); it; ++it) w.push_back(json::array({it.row(), it.col(), it.value()}));
      }
      jl["w_sparse"] = w;
      jl["rows"] = l.out_dim();
      jl["cols"] = l.in_dim();
    }
    jl["b"] = std::vector<double>(l.b.data(), l.b.data() + l.b.size());
    if (l.act == Activation::Rational) jl["act"] = json{{"rational", detail::rational_activation_to_json(*l.rational)}};
    else jl["act"] = activation_name(l.act);
    layers.push_back(jl);
  }
  return json{{"in_dim", net.in_dim()}, {"layers", layers}};
}

inline ReluNet net_from_json(const json& j) {
  const int in_dim = j.at("in_dim").get<int>();
  std::vector<Layer> layers;
  int prev = in_dim;
  for (const auto& jl : j.at("layers")) {
    Layer l;
    const auto b = jl.at("b").get<std::vector<double>>();
    l.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    if (jl.contains("w")) {
      const auto& w = jl.at("w");
      Eigen::MatrixXd d(static_cast<Eigen::Index>(w.size()), w.empty() ? prev : static_cast<Eigen::Index>(w.at(0).size()));
      for (std::size_t r = 0; r < w.size(); ++r) {
        if (static_cast<Eigen::Index>(w[r].size()) != d.cols()) throw PreconditionError("ragged weight matrix in network document");
        for (std::size_t c = 0; c < w[r].size(); ++c) d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r][c].get<double>();
      }
      l.w = d.sparseView(0.0, 0.0);
    } else {
      std::vector<Eigen::Triplet<double>> t;
      for (const auto& e : jl.at("w_sparse")) t.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
      l.w = SparseMatrix(jl.at("rows").get<int>(), jl.at("cols").get<int>());
      l.w.setFromTriplets(t.begin(), t.end());
    }
    l.w.makeCompressed();
    const auto& act = jl.at("act");
    if (act.is_string()) {
      const auto s = act.get<std::string>();
      if (s == "relu") l.act = Activation::ReLU;
      else if (s == "id") l.act = Activation::Identity;
      else throw PreconditionError("unknown activation '" + s + "'");
    } else {
      const json& ra = act.at("rational");
      l.act = Activation::Rational;
      if (ra.contains("newman")) {
        l.rational = RationalActivation::from_newman(NewmanParams(ra["newman"].at("r").get<int>(), ra["newman"].at("b").get<double>()));
      } else {
        l.rational = RationalActivation::from_rational(rational_from_json(ra));
      }
    }
    prev = l.out_dim();
    layers.push_back(std::move(l));
  }
  return ReluNet(in_dim, std::move(layers));
}

}  // namespace ratrelu
