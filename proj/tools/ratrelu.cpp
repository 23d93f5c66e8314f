// ratrelu command-line driver.
//
// Exit codes: 0 success, 1 precondition or hypothesis refusal, 2 numerical
// blowup or evaluation failure, 3 I/O error, 64 usage error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ratrelu/ratrelu.hpp"

using namespace ratrelu;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::size_t grid_n = 0;
  unsigned precision = 0;
  std::string format = "csv";
};

std::size_t grid_or(const Globals& g, std::size_t fallback) { return g.grid_n ? g.grid_n : fallback; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_atomic(path, text);
}

/// Table output: CSV with a header row, or a JSON array of objects.
class Table {
 public:
  explicit Table(std::vector<std::string> cols) : cols_(std::move(cols)) {}
  template <class... V>
  void row(const V&... v) {
    std::vector<std::string> r;
    (r.push_back(cell(v)), ...);
    rows_.push_back(std::move(r));
  }
  std::string render(const std::string& format) const {
    std::ostringstream os;
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows_) {
        json o;
        for (std::size_t i = 0; i < cols_.size(); ++i) {
          // Numbers stay numbers where they parse cleanly.
          char* end = nullptr;
          const double v = std::strtod(r[i].c_str(), &end);
          if (r[i].empty() || !end || *end != '\0') o[cols_[i]] = r[i];
          else if (r[i].find_first_of(".eEn") == std::string::npos) o[cols_[i]] = std::stoll(r[i]);
          else o[cols_[i]] = v;
        }
        arr.push_back(o);
      }
      os << arr.dump(2) << '\n';
    } else {
      for (std::size_t i = 0; i < cols_.size(); ++i) os << (i ? "," : "") << cols_[i];
      os << '\n';
      for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
      }
    }
    return os.str();
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", static_cast<double>(v));
      return buf;
    } else {
      return std::to_string(v);
    }
  }
  std::vector<std::string> cols_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw PreconditionError("cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

/// Coefficients as decimal strings at full working precision. The double
/// terms alone lose the cancellation the collapsed rational depends on.
json exact_terms(const SparsePoly<Extended>& p) {
  json arr = json::array();
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    json e = json::array();
    for (int k = 0; k < p.dim(); ++k) e.push_back(p.exps(i)[k]);
    arr.push_back(json::array({p.coef(i).str(0, std::ios_base::scientific), e}));
  }
  return arr;
}

// ---------------------------------------------------------------------------

void cmd_figure(const Globals& g, int id, const std::string& out, int iterations) {
  FigureJob job;
  job.figure_id = id;
  job.output_dir = out.empty() ? "figure" + std::to_string(id) : out;
  job.grid_n = grid_or(g, 1001);
  job.seed = g.seed;
  job.net_iterations = iterations;
  for (const auto& p : run_figure(job)) std::cout << p.string() << '\n';
}

void cmd_newman(const Globals& g, int r, double b, const std::string& kind, const std::string& out) {
  const Grid grid(kind == "relu" || kind == "relu-tilde" ? Interval(-b, b) : Interval(-1.0, 1.0), grid_or(g, 200001));
  const NewmanParams p(r, kind == "relu" || kind == "relu-tilde" ? b : 1.0);
  std::function<double(double)> approx, target;
  double bound = 0.0;
  if (kind == "abs") {
    approx = [r](double x) { return newman_abs_eval(r, x); };
    target = [](double x) { return std::abs(x); };
    bound = 3.0 * std::exp(-std::sqrt(static_cast<double>(r)));
  } else if (kind == "relu" || kind == "relu-tilde") {
    const NewmanRelu nr(p);
    const bool tilde = kind == "relu-tilde";
    approx = [nr, tilde](double x) { return tilde ? nr.tilde(x) : nr(x); };
    target = [](double x) { return std::max(0.0, x); };
    bound = (tilde ? 1.0 : 3.0) * p.b * p.eps_rb;
  } else if (kind == "threshold") {
    approx = [r](double x) { return newman_threshold_eval(r, x); };
    target = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
  } else if (kind == "poly") {
    const auto n = newman_poly(r);
    approx = [n](double x) { return n(x); };
  } else {
    throw PreconditionError("unknown kind '" + kind + "' (abs, relu, relu-tilde, threshold, poly)");
  }
  Table t({"kind", "r", "b", "sup_err", "bound", "argmax", "grid_n"});
  if (target) {
    const auto rep = sup_error(target, approx, grid);
    t.row(kind, r, p.b, rep.sup_err, bound, rep.argmax, grid.size());
  } else {
    t.row(kind, r, p.b, std::string(""), bound, std::string(""), grid.size());
  }
  std::cout << t.render(g.format);
  if (!out.empty()) {
    json doc;
    if (kind == "abs") doc = to_json(newman_abs<double>(r));
    else if (kind == "relu") doc = to_json(newman_relu<double>(r, b).clipped);
    else if (kind == "relu-tilde") doc = to_json(newman_relu<double>(r, b).tilde);
    else if (kind == "threshold") doc = to_json(newman_threshold<double>(r));
    else doc = to_json(newman_poly_expanded<double>(r));
    write_atomic(out, doc.dump(2) + "\n");
  }
}

void cmd_net_eval(const Globals& g, const std::string& path, const std::vector<std::string>& points) {
  const ReluNet net = net_from_json(read_json(path));
  Table t({"point", "value"});
  for (const auto& s : points) {
    const auto x = parse_point(s);
    if (static_cast<int>(x.size()) != net.in_dim()) {
      throw PreconditionError("point '" + s + "' has " + std::to_string(x.size()) + " coordinates, network expects " +
                              std::to_string(net.in_dim()));
    }
    t.row("\"" + s + "\"", net.eval(x.data()));
  }
  std::cout << t.render(g.format);
}

void cmd_net_pieces(const Globals& g, const std::string& path, double lo, double hi) {
  const ReluNet net = net_from_json(read_json(path));
  const auto pw = enumerate_pieces(net, Interval(lo, hi));
  Table t({"piece", "x_lo", "x_hi", "slope", "intercept"});
  for (std::size_t i = 0; i < pw.pieces(); ++i) t.row(i, pw.knots[i], pw.knots[i + 1], pw.slope(i), pw.intercept(i));
  std::cout << t.render(g.format);
}

int cmd_net_check(const Globals& g, const std::string& path) {
  const ReluNet net = net_from_json(read_json(path));
  const auto rep = check_constraints(net);
  Table t({"layer", "node", "l1_plus_bias", "ok"});
  for (const auto& n : rep.nodes) t.row(n.layer, n.node, n.norm, n.ok);
  std::cout << t.render(g.format);
  if (!rep.ok) {
    std::cerr << "network violates ||a||_1 + |b| <= 1:\n" << rep.violations();
    return 1;
  }
  return 0;
}

void cmd_net_random(const Globals& g, int in_dim, const std::string& widths_s, double scale, bool constrained,
                    const std::string& out) {
  std::vector<int> widths;
  for (double w : parse_point(widths_s)) widths.push_back(static_cast<int>(w));
  std::mt19937_64 rng(g.seed);
  const ReluNet net = constrained ? random_constrained_net(in_dim, widths, rng) : random_relu_net(in_dim, widths, rng, scale);
  write_text(out, net_to_json(net).dump(2) + "\n");
}

void cmd_net2rat(const Globals& g, const std::string& path, double eps, const std::string& out, const std::string& report,
                 bool substitute_only) {
  const ReluNet net = net_from_json(read_json(path));
  if (substitute_only) {
    const auto rn = substitute_activation(net, eps);
    const auto s = make_box_samples(net.in_dim(), Interval(-1.0, 1.0), grid_or(g, kCertificationGridN));
    const auto rep = compare_on_samples(rn.net.eval_batch(s.coords), net.eval_batch(s.coords), s);
    Table t({"eps", "r", "l", "node_eps", "sup_err", "argmax", "certified"});
    t.row(eps, rn.r(), rn.l, rn.node_eps, rep.sup_err, rep.argmax, rep.sup_err <= eps);
    write_text(report, t.render(g.format));
    if (!out.empty()) write_atomic(out, net_to_json(rn.net).dump(2) + "\n");
    return;
  }
  const auto res = net_to_rational(net, eps, grid_or(g, net.in_dim() == 1 ? 20001 : 10000));
  const auto& a = res.collapsed.audit;
  Table t({"eps", "r", "m", "l", "degree", "degree_bound", "theorem_shape", "sup_err", "double_sup_err", "precision_bits",
           "certified"});
  t.row(eps, a.r, a.m, a.l, a.actual, a.bound, res.theorem_shape, res.report.sup_err, res.double_report.sup_err,
        res.collapsed.precision_bits, res.certified);
  write_text(report, t.render(g.format));
  if (!out.empty()) {
    json doc = to_json(res.fn);
    doc["precision_bits"] = res.collapsed.precision_bits;
    doc["num_exact"] = exact_terms(res.collapsed.fn.num);
    doc["den_exact"] = exact_terms(res.collapsed.fn.den);
    write_atomic(out, doc.dump() + "\n");
  }
}

void cmd_rat2net(const Globals& g, const std::string& pp, const std::string& qp, int k, double eps, const std::string& out,
                 const std::string& report) {
  const auto p = polynomial_from_json(read_json(pp));
  const auto q = polynomial_from_json(read_json(qp));
  const auto res = build_division(p, q, k, eps, grid_or(g, kCertificationGridN));
  Table t({"k", "eps", "nodes", "relu_nodes", "depth", "sup_err", "argmax", "certified", "choice", "claimed_shape"});
  t.row(k, eps, res.size.nodes, res.size.relu_nodes, res.size.depth, res.report.sup_err, res.report.argmax,
        res.report.sup_err <= eps, res.size.choice, "\"" + res.size.claimed_shape + "\"");
  write_text(report, t.render(g.format));
  if (!out.empty()) write_atomic(out, net_to_json(res.net).dump() + "\n");
}

int cmd_audit_theorem2(const Globals& g, int k, std::size_t samples, const std::string& out) {
  std::mt19937_64 rng(g.seed);
  std::vector<RationalFn<double>> cands;
  const std::size_t budget = k >= 2 ? (std::size_t{1} << (k - 2)) : 1;
  for (std::size_t i = 0; i < samples; ++i) cands.push_back(random_few_term_rational(rng, std::max<std::size_t>(2, budget)));
  const auto reps = theorem2_sweep(k, cands, grid_or(g, kSeparationGridN));
  std::ostringstream os;
  int failures = 0;
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& r : reps) {
      arr.push_back({{"k", r.k}, {"term_budget", r.term_budget}, {"term_count", r.term_count}, {"crossings", r.measured_crossings},
                     {"descartes_bound", r.descartes_bound}, {"l1_gap", r.l1_gap}, {"bound", r.bound},
                     {"counting_bound", r.counting_bound}, {"descartes_ok", r.descartes_ok}, {"counting_ok", r.counting_ok},
                     {"pass", r.pass}});
      failures += !r.pass;
    }
    os << arr.dump(2) << '\n';
  } else {
    os << SeparationReport::csv_header() << '\n';
    for (const auto& r : reps) {
      os << r.csv_row() << '\n';
      failures += !r.pass;
    }
  }
  write_text(out, os.str());
  if (failures) std::cerr << failures << " candidate(s) beat the 1/64 bound\n";
  return 0;
}

int cmd_audit_prop4(const Globals& g, int m, int l, std::size_t samples, std::size_t trained, const std::string& out) {
  const auto nets = shallow_sweep_nets(m, l, samples > trained ? samples - trained : 0, std::min(trained, samples), g.seed);
  std::ostringstream os;
  os << Prop4Report::csv_header() << '\n';
  int failures = 0;
  for (const auto& n : nets) {
    const auto r = prop4_audit(n, grid_or(g, kSeparationGridN));
    os << r.csv_row() << '\n';
    failures += !r.pass || !r.pieces_ok;
  }
  write_text(out, os.str());
  if (failures) std::cerr << failures << " network(s) failed the audit\n";
  return 0;
}

void cmd_audit_corollary4(const Globals& g, int k, double eps, std::size_t samples, const std::string& out) {
  const auto r = corollary4_scenario(k, eps, samples, g.seed, grid_or(g, (1u << 18) + 1));
  write_text(out, Corollary4Report::csv_header() + "\n" + r.csv_row() + "\n");
}

void cmd_fit(const Globals& g, const std::string& kind, const std::string& target_name, int degree, const std::string& widths_s,
             int iterations, const std::string& out) {
  const auto t = target_by_name(target_name);
  const Grid grid(t.interval, grid_or(g, 1001));
  const auto y = sample_target(t.f, grid);
  json doc;
  Table table({"kind", "target", "residual", "warning"});
  if (kind == "poly") {
    const auto f = fit_poly_ls(y, degree, grid);
    doc = to_json(f.poly);
    table.row(kind, target_name, f.residual, "\"" + f.warning + "\"");
  } else if (kind == "rational") {
    const auto f = fit_rational_ls(y, degree, grid, iterations);
    doc = to_json(f.fn);
    table.row(kind, target_name, f.residual, "\"" + f.warning + "\"");
  } else {
    std::vector<int> widths;
    for (double w : parse_point(widths_s)) widths.push_back(static_cast<int>(w));
    const auto f = fit_relu_net(y, grid, widths, iterations, g.seed);
    doc = net_to_json(f.net);
    table.row(kind, target_name, std::sqrt(f.loss), std::string("\"\""));
  }
  std::cout << table.render(g.format);
  if (!out.empty()) write_atomic(out, doc.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ratrelu: conversions between ReLU networks, polynomials and rational functions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--grid-n", g.grid_n, "Grid size (0 = command default)")->capture_default_str();
  app.add_option("--precision", g.precision, "Extended precision mantissa bits (overrides RATRELU_PRECISION)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  int rc = 0;

  auto* fig = app.add_subcommand("figure", "Write data.csv and plot.svg for a comparison figure");
  int fig_id = 1, fig_iter = 10000;
  std::string fig_out;
  fig->add_option("id", fig_id, "Figure number 1..6")->required()->check(CLI::Range(1, 6));
  fig->add_option("--out", fig_out, "Output directory (default figure<ID>)");
  fig->add_option("--iterations", fig_iter, "Gradient steps for the ReLU network fits")->capture_default_str();
  fig->callback([&] { cmd_figure(g, fig_id, fig_out, fig_iter); });

  auto* nw = app.add_subcommand("newman", "Newman approximants: error report and optional explicit JSON");
  int nw_r = 9;
  double nw_b = 1.0;
  std::string nw_kind = "relu", nw_out;
  nw->add_option("--r", nw_r, "Degree r >= 5")->capture_default_str();
  nw->add_option("--b", nw_b, "Scale b >= 1 (relu kinds)")->capture_default_str();
  nw->add_option("--kind", nw_kind, "abs, relu, relu-tilde, threshold or poly")->capture_default_str();
  nw->add_option("--out", nw_out, "Write the explicit rational (r <= 64) as JSON");
  nw->callback([&] { cmd_newman(g, nw_r, nw_b, nw_kind, nw_out); });

  auto* net = app.add_subcommand("net", "Inspect ReLU network documents");
  net->require_subcommand(1);
  std::string net_path;
  auto* n_eval = net->add_subcommand("eval", "Evaluate at points");
  std::vector<std::string> n_points;
  n_eval->add_option("--net", net_path, "Network JSON")->required();
  n_eval->add_option("--x", n_points, "Point as comma-separated coordinates (repeatable)")->required();
  n_eval->callback([&] { cmd_net_eval(g, net_path, n_points); });
  auto* n_pieces = net->add_subcommand("pieces", "Affine pieces of a univariate network");
  double n_lo = -1.0, n_hi = 1.0;
  n_pieces->add_option("--net", net_path, "Network JSON")->required();
  n_pieces->add_option("--lo", n_lo, "Interval start")->capture_default_str();
  n_pieces->add_option("--hi", n_hi, "Interval end")->capture_default_str();
  n_pieces->callback([&] { cmd_net_pieces(g, net_path, n_lo, n_hi); });
  auto* n_check = net->add_subcommand("check", "Per-node check of ||a||_1 + |b| <= 1");
  n_check->add_option("--net", net_path, "Network JSON")->required();
  n_check->callback([&] { rc = cmd_net_check(g, net_path); });
  auto* n_rand = net->add_subcommand("random", "Write a random network");
  int nr_in = 1;
  std::string nr_widths = "3,3", nr_out;
  double nr_scale = 2.0;
  bool nr_constrained = false;
  n_rand->add_option("--in", nr_in, "Input dimension")->capture_default_str();
  n_rand->add_option("--widths", nr_widths, "Widths, comma-separated (hidden layers; with --constrained every layer including the output)")->capture_default_str();
  n_rand->add_option("--scale", nr_scale, "Weight range [-s, s] for unconstrained nets")->capture_default_str();
  n_rand->add_flag("--constrained", nr_constrained, "All-ReLU net with ||a||_1 + |b| <= 1 per node");
  n_rand->add_option("--out", nr_out, "Output path (default stdout)");
  n_rand->callback([&] { cmd_net_random(g, nr_in, nr_widths, nr_scale, nr_constrained, nr_out); });

  auto* n2r = app.add_subcommand("net2rat", "ReLU network to rational function");
  std::string n2r_net, n2r_out, n2r_report;
  double n2r_eps = 0.1;
  bool n2r_sub = false;
  n2r->add_option("--net", n2r_net, "Network JSON")->required();
  n2r->add_option("--eps", n2r_eps, "Target accuracy")->capture_default_str();
  n2r->add_option("--out", n2r_out, "Rational JSON (or substituted network with --substitute-only)");
  n2r->add_option("--report", n2r_report, "Report path (default stdout)");
  n2r->add_flag("--substitute-only", n2r_sub, "Stop after replacing activations");
  n2r->callback([&] { cmd_net2rat(g, n2r_net, n2r_eps, n2r_out, n2r_report, n2r_sub); });

  auto* r2n = app.add_subcommand("rat2net", "p/q on [0,1]^d to a ReLU network");
  std::string r2n_p, r2n_q, r2n_out, r2n_report;
  int r2n_k = 1;
  double r2n_eps = 0.1;
  r2n->add_option("--p", r2n_p, "Numerator polynomial JSON")->required();
  r2n->add_option("--q", r2n_q, "Denominator polynomial JSON")->required();
  r2n->add_option("--k", r2n_k, "q >= 2^-k on [0,1]^d")->required();
  r2n->add_option("--eps", r2n_eps, "Target accuracy")->capture_default_str();
  r2n->add_option("--out", r2n_out, "Network JSON");
  r2n->add_option("--report", r2n_report, "Report path (default stdout)");
  r2n->callback([&] { cmd_rat2net(g, r2n_p, r2n_q, r2n_k, r2n_eps, r2n_out, r2n_report); });

  auto* audit = app.add_subcommand("audit", "Lower-bound falsification sweeps");
  audit->require_subcommand(1);
  std::string a_out;
  std::size_t a_samples = 100;
  auto* a_t2 = audit->add_subcommand("theorem2", "Few-term rationals against the k-fold triangle");
  int a_k = 5;
  a_t2->add_option("--k", a_k, "k >= 2")->capture_default_str();
  a_t2->add_option("--samples", a_samples, "Number of random rationals")->capture_default_str();
  a_t2->add_option("--out", a_out, "CSV path (default stdout)");
  a_t2->callback([&] { rc = cmd_audit_theorem2(g, a_k, a_samples, a_out); });
  auto* a_p4 = audit->add_subcommand("prop4", "Shallow ReLU networks against 1/x on [1/2, 3/4]");
  int a_m = 2, a_l = 2;
  std::size_t a_trained = 10;
  a_p4->add_option("--m", a_m, "Width")->capture_default_str();
  a_p4->add_option("--l", a_l, "Hidden layers")->capture_default_str();
  a_p4->add_option("--samples", a_samples, "Number of networks")->capture_default_str();
  a_p4->add_option("--trained", a_trained, "How many of them are fitted rather than random")->capture_default_str();
  a_p4->add_option("--out", a_out, "CSV path (default stdout)");
  a_p4->callback([&] { rc = cmd_audit_prop4(g, a_m, a_l, a_samples, a_trained, a_out); });
  auto* a_c4 = audit->add_subcommand("corollary4", "Rational network from the k-fold triangle against few-term rationals");
  double a_eps = 1.0 / 256.0;
  a_c4->add_option("--k", a_k, "k >= 3")->capture_default_str();
  a_c4->add_option("--eps", a_eps, "Substitution accuracy")->capture_default_str();
  a_c4->add_option("--samples", a_samples, "Number of random rationals")->capture_default_str();
  a_c4->add_option("--out", a_out, "CSV path (default stdout)");
  a_c4->callback([&] { cmd_audit_corollary4(g, a_k, a_eps, a_samples, a_out); });

  auto* fit = app.add_subcommand("fit", "Least-squares fits to named targets");
  std::string f_kind, f_target = "spike", f_out, f_widths = "3,3";
  int f_degree = 9, f_iter = 0;
  fit->add_option("kind", f_kind, "poly, rational or net")->required()->check(CLI::IsMember({"poly", "rational", "net"}));
  fit->add_option("--target", f_target, "spike, threshold, relu, triangle, triangle3 or recip")->capture_default_str();
  fit->add_option("--degree", f_degree, "Polynomial/rational degree")->capture_default_str();
  fit->add_option("--widths", f_widths, "Hidden widths for net fits")->capture_default_str();
  fit->add_option("--iterations", f_iter, "Passes (rational) or gradient steps (net); 0 = default");
  fit->add_option("--out", f_out, "Model JSON");
  fit->callback([&] { cmd_fit(g, f_kind, f_target, f_degree, f_widths, f_iter ? f_iter : (f_kind == "net" ? 10000 : 20), f_out); });

  app.parse_complete_callback([&] {
    if (g.precision) setenv("RATRELU_PRECISION", std::to_string(g.precision).c_str(), 1);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 64;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const HypothesisError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 1;
  } catch (const BlowupError& e) {
    std::cerr << "blowup: " << e.what() << '\n';
    return 2;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation failure: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  }
  return rc;
}
