#pragma once

// Comparison figures: sampled curves written as data.csv and plot.svg.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ratrelu/fitlab.hpp"
#include "ratrelu/net2rat.hpp"
#include "ratrelu/newman.hpp"
#include "ratrelu/numcore.hpp"
#include "ratrelu/relunet.hpp"

namespace ratrelu {

struct Curve {
  std::string name;
  std::vector<double> values;
};

struct FigureData {
  int id = 0;
  std::string title;
  Interval interval;
  std::vector<double> x;
  std::vector<Curve> curves;
  std::vector<std::pair<std::string, std::string>> meta;
};

struct FigureJob {
  int figure_id = 1;
  std::filesystem::path output_dir = ".";
  std::size_t grid_n = 1001;
  std::uint64_t seed = 1;
  int net_iterations = 10000;
};

namespace detail {
inline Curve sample_curve(const std::string& name, const Grid& g, const std::function<double(double)>& f) {
  Curve c{name, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) c.values[i] = f(g[i]);
  return c;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Target, degree-9 least-squares polynomial and a 2x3 ReLU fit, shared by
/// several figures.
inline void add_poly_and_net(FigureData& fig, const Grid& g, const std::vector<double>& y, const FigureJob& job) {
  const auto pf = fit_poly_ls(y, 9, g);
  fig.curves.push_back(sample_curve("poly9", g, [&](double x) { return pf.poly(x); }));
  fig.meta.push_back({"poly9_rms", fmt(pf.residual)});
  const auto nf = fit_relu_net(y, g, {3, 3}, job.net_iterations, job.seed);
  fig.curves.push_back(Curve{"relu_net_3x3", nf.net.eval_batch(g.points())});
  fig.meta.push_back({"relu_net_mse", fmt(nf.loss)});
}
}  // namespace detail

inline FigureData make_figure(const FigureJob& job) {
  if (job.figure_id < 1 || job.figure_id > 6) throw PreconditionError("figure id must be 1..6, got " + std::to_string(job.figure_id));
  if (job.grid_n < 2) throw PreconditionError("figure grid needs at least 2 points");
  FigureData fig;
  fig.id = job.figure_id;
  auto setup = [&](const std::string& title, Interval iv) {
    fig.title = title;
    fig.interval = iv;
    const Grid g(iv, job.grid_n);
    fig.x = g.points();
    return g;
  };
  fig.meta.push_back({"grid_n", std::to_string(job.grid_n)});
  fig.meta.push_back({"seed", std::to_string(job.seed)});
  switch (job.figure_id) {
    case 1: {
      const auto t = target_by_name("spike");
      const Grid g = setup("spike: 1/x on [1/4,1], 0 elsewhere", t.interval);
      const auto y = sample_target(t.f, g);
      fig.curves.push_back({"spike", y});
      const auto rf = fit_rational_ls(y, 9, g, 20);
      fig.curves.push_back(detail::sample_curve("rational9_ls", g, [&](double x) { return rf.fn.eval(&x); }));
      fig.meta.push_back({"rational9_rms", detail::fmt(rf.residual)});
      detail::add_poly_and_net(fig, g, y, job);
      break;
    }
    case 2: {
      const auto t = target_by_name("threshold");
      const Grid g = setup("threshold", t.interval);
      const auto y = sample_target(t.f, g);
      fig.curves.push_back({"threshold", y});
      const auto pf = fit_poly_ls(y, 9, g);
      fig.curves.push_back(detail::sample_curve("poly9", g, [&](double x) { return pf.poly(x); }));
      fig.curves.push_back(detail::sample_curve("newman_threshold9", g, [](double x) { return newman_threshold_eval(9, x); }));
      break;
    }
    case 3: {
      const Grid g = setup("Newman polynomials of degree 5, 9, 13", Interval(-1.0, 1.0));
      for (int r : {5, 9, 13}) {
        const auto n = newman_poly(r);
        fig.curves.push_back(detail::sample_curve("N" + std::to_string(r), g, [&](double x) { return n(x); }));
      }
      break;
    }
    case 4:
    case 6: {
      const int k = job.figure_id == 4 ? 1 : 3;
      const auto t = target_by_name(k == 1 ? "triangle" : "triangle3");
      const Grid g = setup(k == 1 ? "triangle" : "triangle^3", t.interval);
      const auto y = sample_target(t.f, g);
      fig.curves.push_back({t.name, y});
      const auto rn = substitute_with(build_triangle(k), NewmanParams(9, 1.0));
      fig.curves.push_back(Curve{"newman_rational9", rn.net.eval_batch(g.points())});
      detail::add_poly_and_net(fig, g, y, job);
      break;
    }
    case 5: {
      const auto t = target_by_name("relu");
      const Grid g = setup("ReLU", t.interval);
      const auto y = sample_target(t.f, g);
      fig.curves.push_back({"relu", y});
      const auto pf = fit_poly_ls(y, 9, g);
      fig.curves.push_back(detail::sample_curve("poly9", g, [&](double x) { return pf.poly(x); }));
      const NewmanRelu nr(NewmanParams(9, 1.0));
      fig.curves.push_back(detail::sample_curve("newman_relu9", g, [&](double x) { return nr(x); }));
      break;
    }
  }
  return fig;
}

inline std::string figure_csv(const FigureData& fig) {
  std::ostringstream os;
  os << "x";
  for (const auto& c : fig.curves) os << ',' << c.name;
  os << '\n';
  for (std::size_t i = 0; i < fig.x.size(); ++i) {
    os << detail::fmt(fig.x[i]);
    for (const auto& c : fig.curves) os << ',' << detail::fmt(c.values[i]);
    os << '\n';
  }
  return os.str();
}

/// 800x500, linear axes, one polyline per curve. Values outside the plotted
/// y-range (the target's range padded by 25%) are clamped to the frame.
inline std::string figure_svg(const FigureData& fig) {
  static const char* palette[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  const double W = 800, H = 500, L = 70, R = 20, T = 40, B = 50;
  double ylo = INFINITY, yhi = -INFINITY;
  const auto& ref = fig.id == 3 ? fig.curves : std::vector<Curve>{fig.curves.front()};
  for (const auto& c : ref) {
    for (double v : c.values) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  }
  const double pad = 0.25 * std::max(yhi - ylo, 1e-9);
  ylo -= pad;
  yhi += pad;
  const double x0 = fig.interval.lo, x1 = fig.interval.hi;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) {
    y = std::clamp(y, ylo, yhi);
    return H - B - (y - ylo) / (yhi - ylo) * (H - T - B);
  };
  auto f1 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
  os << "<desc>";
  for (const auto& [k, v] : fig.meta) os << k << '=' << v << ';';
  os << "</desc>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">Figure " << fig.id << ": "
     << fig.title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"#444\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << L << "\" y=\"" << H - B + 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << detail::fmt(x0) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 20 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
     << detail::fmt(x1) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
     << detail::fmt(ylo) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
     << detail::fmt(yhi) << "</text>\n";
  for (std::size_t c = 0; c < fig.curves.size(); ++c) {
    const char* color = palette[c % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-curve=\"" << fig.curves[c].name
       << "\" points=\"";
    for (std::size_t i = 0; i < fig.x.size(); ++i) {
      os << (i ? " " : "") << f1(px(fig.x[i])) << ',' << f1(py(fig.curves[c].values[i]));
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 150 << "\" y=\"" << T + 16 * (c + 1) << "\" fill=\"" << color
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << fig.curves[c].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Writes `content` to a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::vector<std::filesystem::path> run_figure(const FigureJob& job) {
  const auto fig = make_figure(job);
  const auto csv = job.output_dir / "data.csv";
  const auto svg = job.output_dir / "plot.svg";
  write_atomic(csv, figure_csv(fig));
  write_atomic(svg, figure_svg(fig));
  return {csv, svg};
}

}  // namespace ratrelu
