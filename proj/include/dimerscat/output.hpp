#pragma once

// CSV and self-contained SVG emission for sweep results.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dimerscat/errors.hpp"
#include "dimerscat/sweep.hpp"

namespace dimerscat {

/// Full double precision (17 significant digits).
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline int max_cutoff(const std::vector<SweepRow>& rows) {
  int n_c = 0;
  for (const auto& r : rows) n_c = std::max(n_c, r.n_c);
  return n_c;
}

inline double channel_value(const std::vector<double>& v, int n) {
  return n < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(n)] : 0.0;
}

/// Header `param,j_re_0..j_re_nc,j_tr_0..j_tr_nc,j_total,residual,n_c,status`;
/// channels absent at a row (closed there) are written as 0.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw UsageError("no rows to write");
  const int nc = max_cutoff(rows);
  std::ostringstream out;
  out << "param";
  for (int n = 0; n <= nc; ++n) out << ",j_re_" << n;
  for (int n = 0; n <= nc; ++n) out << ",j_tr_" << n;
  out << ",j_total,residual,n_c,status\n";
  for (const auto& r : rows) {
    out << format_double(r.param);
    for (int n = 0; n <= nc; ++n) out << ',' << format_double(channel_value(r.j_re, n));
    for (int n = 0; n <= nc; ++n) out << ',' << format_double(channel_value(r.j_tr, n));
    out << ',' << format_double(r.j_total) << ',' << format_double(r.residual) << ',' << r.n_c << ','
        << to_string(r.status) << '\n';
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing " + path);
}

inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  write_text_file(path, sweep_csv(rows));
}

// ---------------------------------------------------------------------------
// SVG

struct PlotSeries {
  std::string name;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotData {
  std::vector<double> x;
  std::vector<PlotSeries> series;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "parameter";
  std::string y_label = "j";
  SweepScale x_scale = SweepScale::linear;
  std::vector<double> markers;  // vertical lines, e.g. channel thresholds
  bool total_only = false;      // plot j_total alone
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                 "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
  return colors[i % (sizeof colors / sizeof colors[0])];
}

}  // namespace detail

inline std::string render_svg(const PlotData& data, const PlotSpec& spec) {
  if (data.x.size() < 2) throw UsageError("a plot needs at least two points");
  const bool logx = spec.x_scale == SweepScale::log;
  const auto xmap_raw = [&](double x) { return logx ? std::log10(x) : x; };

  double x0 = xmap_raw(*std::min_element(data.x.begin(), data.x.end()));
  double x1 = xmap_raw(*std::max_element(data.x.begin(), data.x.end()));
  if (x1 <= x0) x1 = x0 + 1.0;
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& s : data.series)
    for (double v : s.y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(y0 > 0.25 * y1)) y0 = std::min(y0, 0.0);
  if (y1 - y0 < 1e-9 * std::max(1.0, std::abs(y1))) {
    const double pad = 0.05 * std::max(1.0, std::abs(y1));
    y0 -= pad;
    y1 += pad;
  } else {
    y1 += 0.05 * (y1 - y0);
  }

  constexpr double W = 760, H = 480, left = 72, right = 170, top = 44, bottom = 62;
  const double pw = W - left - right, ph = H - top - bottom;
  const auto px = [&](double x) { return left + (xmap_raw(x) - x0) / (x1 - x0) * pw; };
  const auto pxr = [&](double xr) { return left + (xr - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    o << "<text x=\"" << detail::fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::xml_escape(spec.title) << "</text>\n";
  }
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks
  std::vector<std::pair<double, std::string>> xticks;
  if (logx) {
    for (double d = std::ceil(x0 - 1e-9); d <= x1 + 1e-9; d += 1.0) xticks.emplace_back(d, "1e" + detail::fmt(d, "%.0f"));
  } else {
    for (double t : detail::linear_ticks(x0, x1)) xticks.emplace_back(t, detail::fmt(t, "%g"));
  }
  for (const auto& [t, label] : xticks) {
    const double X = pxr(t);
    o << "<line x1=\"" << detail::fmt(X) << "\" y1=\"" << detail::fmt(top + ph) << "\" x2=\"" << detail::fmt(X)
      << "\" y2=\"" << detail::fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << detail::fmt(X) << "\" y=\"" << detail::fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << label << "</text>\n";
  }
  for (double t : detail::linear_ticks(y0, y1)) {
    const double Y = py(t);
    o << "<line x1=\"" << detail::fmt(left - 5) << "\" y1=\"" << detail::fmt(Y) << "\" x2=\"" << detail::fmt(left)
      << "\" y2=\"" << detail::fmt(Y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << detail::fmt(left - 8) << "\" y=\"" << detail::fmt(Y + 4) << "\" text-anchor=\"end\">"
      << detail::fmt(t, "%g") << "</text>\n";
  }
  o << "<text x=\"" << detail::fmt(left + pw / 2) << "\" y=\"" << detail::fmt(H - 16)
    << "\" text-anchor=\"middle\">" << detail::xml_escape(spec.x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << detail::fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << detail::fmt(top + ph / 2) << ")\">" << detail::xml_escape(spec.y_label) << "</text>\n";

  for (double m : spec.markers) {
    if (logx && !(m > 0.0)) continue;
    const double X = px(m);
    if (X < left - 1e-9 || X > left + pw + 1e-9) continue;
    o << "<line class=\"marker\" x1=\"" << detail::fmt(X) << "\" y1=\"" << top << "\" x2=\"" << detail::fmt(X)
      << "\" y2=\"" << detail::fmt(top + ph) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
  }

  for (std::size_t s = 0; s < data.series.size(); ++s) {
    const auto& series = data.series[s];
    std::string points;
    const auto flush = [&] {
      if (points.empty()) return;
      o << "<polyline fill=\"none\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"1.5\""
        << (series.dashed ? " stroke-dasharray=\"6,3\"" : "") << " points=\"" << points << "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < data.x.size() && i < series.y.size(); ++i) {
      if (!std::isfinite(series.y[i])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += detail::fmt(px(data.x[i])) + "," + detail::fmt(py(series.y[i]));
    }
    flush();
    const double ly = top + 10 + 16.0 * s;
    const double lx = left + pw + 12;
    o << "<line x1=\"" << detail::fmt(lx) << "\" y1=\"" << detail::fmt(ly) << "\" x2=\"" << detail::fmt(lx + 24)
      << "\" y2=\"" << detail::fmt(ly) << "\" stroke=\"" << detail::palette(s) << "\" stroke-width=\"1.5\""
      << (series.dashed ? " stroke-dasharray=\"6,3\"" : "") << "/>\n";
    o << "<text x=\"" << detail::fmt(lx + 30) << "\" y=\"" << detail::fmt(ly + 4) << "\">"
      << detail::xml_escape(series.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

/// One series per reflection and transmission column plus j_total.
inline PlotData sweep_plot_data(const std::vector<SweepRow>& rows, bool total_only = false) {
  PlotData data;
  const int nc = max_cutoff(rows);
  for (const auto& r : rows) data.x.push_back(r.param);
  const auto column = [&](auto&& get) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(get(r));
    return y;
  };
  if (!total_only) {
    for (int n = 0; n <= nc; ++n) {
      data.series.push_back({"j_re_" + std::to_string(n),
                             column([&](const SweepRow& r) { return channel_value(r.j_re, n); }), false});
      data.series.push_back({"j_tr_" + std::to_string(n),
                             column([&](const SweepRow& r) { return channel_value(r.j_tr, n); }), true});
    }
  }
  data.series.push_back({"j_total", column([](const SweepRow& r) { return r.j_total; }), false});
  return data;
}

inline void emit_svg(const std::vector<SweepRow>& rows, const std::string& path, const PlotSpec& spec) {
  if (rows.size() < 2) throw UsageError("an SVG plot needs at least two rows");
  write_text_file(path, render_svg(sweep_plot_data(rows, spec.total_only), spec));
}

}  // namespace dimerscat
