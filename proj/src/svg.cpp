#include "rq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rq::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svg: cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("svg: write failed: " + path);
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void pad(double frac) {
    const double span = hi - lo;
    const double margin = span > 0.0 ? frac * span : (lo == 0.0 ? 1.0 : std::abs(lo) * frac);
    lo -= margin;
    hi += margin;
  }
};

Range data_range(const std::vector<const std::vector<double>*>& columns) {
  Range r{1e300, -1e300};
  for (const auto* col : columns)
    for (double v : *col) {
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  return r;
}

}  // namespace

void emit_pointcloud(const std::string& path, const ParticleConfig& points) {
  if (points.n < 1) throw std::invalid_argument("emit_pointcloud: empty point set");
  if (points.dim < 2) throw std::invalid_argument("emit_pointcloud: need at least 2 coordinates");

  const double size = 640.0, margin = 40.0;
  std::vector<double> xs(points.n), ys(points.n);
  for (int i = 0; i < points.n; ++i) {
    xs[i] = points.point(i)[0];
    ys[i] = points.point(i)[1];
  }
  Range rx = data_range({&xs});
  Range ry = data_range({&ys});
  rx.pad(0.05);
  ry.pad(0.05);
  // equal aspect: one scale for both axes, centered
  const double span = std::max(rx.hi - rx.lo, ry.hi - ry.lo);
  const double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
  const double scale = (size - 2.0 * margin) / span;
  auto px = [&](double x) { return 0.5 * size + (x - cx) * scale; };
  auto py = [&](double y) { return 0.5 * size - (y - cy) * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "<rect x=\"0.5\" y=\"0.5\" width=\"" << size - 1 << "\" height=\"" << size - 1
     << "\" fill=\"white\" stroke=\"#cccccc\"/>\n";
  for (int i = 0; i < points.n; ++i)
    os << "<circle cx=\"" << fmt(px(xs[i])) << "\" cy=\"" << fmt(py(ys[i]))
       << "\" r=\"2.5\" fill=\"#1f77b4\" fill-opacity=\"0.8\"/>\n";
  os << "</svg>\n";
  write_file(path, os.str());
}

void emit_series(const std::string& path, const std::vector<Series>& series, Axes axes,
                 const std::string& x_label, const std::string& y_label) {
  if (series.empty()) throw std::invalid_argument("emit_series: no series");
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size())
      throw std::invalid_argument("emit_series: empty or ragged series '" + s.name + "'");
    if (axes == Axes::LogLog)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0))
          throw std::invalid_argument("emit_series: log-log needs positive data in '" + s.name +
                                      "'");
  }

  const double width = 720.0, height = 480.0, margin = 60.0;
  auto tx = [axes](double v) { return axes == Axes::LogLog ? std::log10(v) : v; };

  std::vector<std::vector<double>> txs, tys;
  for (const auto& s : series) {
    std::vector<double> sx(s.x.size()), sy(s.y.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      sx[i] = tx(s.x[i]);
      sy[i] = tx(s.y[i]);
    }
    txs.push_back(std::move(sx));
    tys.push_back(std::move(sy));
  }
  std::vector<const std::vector<double>*> xcols, ycols;
  for (const auto& c : txs) xcols.push_back(&c);
  for (const auto& c : tys) ycols.push_back(&c);
  Range rx = data_range(xcols);
  Range ry = data_range(ycols);
  rx.pad(0.06);
  ry.pad(0.08);

  auto px = [&](double v) { return margin + (v - rx.lo) / (rx.hi - rx.lo) * (width - 2 * margin); };
  auto py = [&](double v) {
    return height - margin - (v - ry.lo) / (ry.hi - ry.lo) * (height - 2 * margin);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect x=\"0.5\" y=\"0.5\" width=\"" << width - 1 << "\" height=\"" << height - 1
     << "\" fill=\"white\" stroke=\"#cccccc\"/>\n";
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
     << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"#888888\"/>\n";

  // ticks: decades in log-log mode, 5 even ticks otherwise
  auto emit_xtick = [&](double v, const std::string& label) {
    const double x = px(v);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(height - margin) << "\" x2=\"" << fmt(x)
       << "\" y2=\"" << fmt(height - margin + 5) << "\" stroke=\"#555555\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(height - margin + 18)
       << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333333\">" << label << "</text>\n";
  };
  auto emit_ytick = [&](double v, const std::string& label) {
    const double y = py(v);
    os << "<line x1=\"" << fmt(margin - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(margin)
       << "\" y2=\"" << fmt(y) << "\" stroke=\"#555555\"/>\n";
    os << "<text x=\"" << fmt(margin - 8) << "\" y=\"" << fmt(y + 4)
       << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333333\">" << label << "</text>\n";
  };
  if (axes == Axes::LogLog) {
    for (double d = std::ceil(rx.lo); d <= std::floor(rx.hi) + 1e-12; d += 1.0)
      emit_xtick(d, "1e" + fmt_tick(d));
    for (double d = std::ceil(ry.lo); d <= std::floor(ry.hi) + 1e-12; d += 1.0)
      emit_ytick(d, "1e" + fmt_tick(d));
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double vx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
      const double vy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
      emit_xtick(vx, fmt_tick(vx));
      emit_ytick(vy, fmt_tick(vy));
    }
  }
  if (!x_label.empty())
    os << "<text x=\"" << fmt(width / 2) << "\" y=\"" << fmt(height - 12)
       << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">" << x_label << "</text>\n";
  if (!y_label.empty())
    os << "<text x=\"16\" y=\"" << fmt(height / 2)
       << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\" transform=\"rotate(-90 16 "
       << fmt(height / 2) << ")\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < txs[s].size(); ++i) {
      if (i) os << ' ';
      os << fmt(px(txs[s][i])) << ',' << fmt(py(tys[s][i]));
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < txs[s].size(); ++i)
      os << "<circle cx=\"" << fmt(px(txs[s][i])) << "\" cy=\"" << fmt(py(tys[s][i]))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << fmt(width - margin - 6) << "\" y=\"" << fmt(margin + 16 + 16 * s)
       << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">" << series[s].name
       << "</text>\n";
  }
  os << "</svg>\n";
  write_file(path, os.str());
}

}  // namespace rq::svg
