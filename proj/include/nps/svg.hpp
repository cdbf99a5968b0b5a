#pragma once
#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nps/csv.hpp"

namespace nps {

// Minimal self-contained SVG line chart. Pure function of its inputs: same
// series in, same bytes out (doubles go through the shortest-form writer).
struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
  bool markers = true;
  bool line = true;
  bool dashed = false;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<SvgSeries> series;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string fnum(double v) { return format_double(v); }

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double px0 = 0.0, px1 = 1.0;

  double to_px(double v) const {
    double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                   : (v - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }
};

inline std::vector<double> linear_ticks(double lo, double hi, int target = 6) {
  double span = hi - lo;
  if (span <= 0) return {lo};
  double raw = span / target;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 1e-12 * span; t += step) ticks.push_back(t == 0 ? 0.0 : t);
  return ticks;
}

inline std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  int e0 = static_cast<int>(std::floor(std::log10(lo)));
  int e1 = static_cast<int>(std::ceil(std::log10(hi)));
  for (int e = e0; e <= e1; ++e) {
    double t = std::pow(10.0, e);
    if (t >= lo * (1 - 1e-12) && t <= hi * (1 + 1e-12)) ticks.push_back(t);
  }
  if (ticks.empty()) ticks = {lo, hi};
  return ticks;
}

} // namespace detail

inline std::string render_svg(const SvgChart& chart) {
  if (chart.series.empty()) throw std::runtime_error("svg chart has no series");
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : chart.series) {
    if (s.x.size() != s.y.size()) throw std::runtime_error("svg series length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double yv = s.y[i];
      if (chart.log_y && yv <= 0) continue; // log axis skips nonpositive points
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  }
  if (xmin > xmax) throw std::runtime_error("svg chart has no drawable points");
  if (xmin == xmax) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymin == ymax) {
    if (chart.log_y) {
      ymin *= 0.5;
      ymax *= 2.0;
    } else {
      ymin -= 0.5;
      ymax += 0.5;
    }
  }
  if (!chart.log_y) {
    double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  } else {
    ymin *= 0.8;
    ymax *= 1.25;
  }

  const double ml = 72, mr = 18, mt = 34, mb = 52;
  detail::AxisScale xs{xmin, xmax, false, ml, chart.width - mr};
  detail::AxisScale ys{ymin, ymax, chart.log_y, chart.height - mb, mt};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) +
         "\" height=\"" + std::to_string(chart.height) + "\" viewBox=\"0 0 " +
         std::to_string(chart.width) + " " + std::to_string(chart.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::fnum(chart.width / 2.0) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         detail::escape_xml(chart.title) + "</text>\n";

  // axes + ticks + grid
  auto xticks = detail::linear_ticks(xmin, xmax);
  auto yticks = chart.log_y ? detail::log_ticks(ymin, ymax) : detail::linear_ticks(ymin, ymax);
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : xticks) {
    double px = xs.to_px(t);
    svg += "<line x1=\"" + detail::fnum(px) + "\" y1=\"" + detail::fnum(mt) + "\" x2=\"" +
           detail::fnum(px) + "\" y2=\"" + detail::fnum(chart.height - mb) +
           "\" stroke=\"#eee\"/>\n";
    svg += "<text x=\"" + detail::fnum(px) + "\" y=\"" + detail::fnum(chart.height - mb + 16) +
           "\" text-anchor=\"middle\">" + detail::fnum(t) + "</text>\n";
  }
  for (double t : yticks) {
    double py = ys.to_px(t);
    svg += "<line x1=\"" + detail::fnum(ml) + "\" y1=\"" + detail::fnum(py) + "\" x2=\"" +
           detail::fnum(chart.width - mr) + "\" y2=\"" + detail::fnum(py) +
           "\" stroke=\"#eee\"/>\n";
    svg += "<text x=\"" + detail::fnum(ml - 6) + "\" y=\"" + detail::fnum(py + 4) +
           "\" text-anchor=\"end\">" + detail::fnum(t) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + detail::fnum(ml) + "\" y=\"" + detail::fnum(mt) + "\" width=\"" +
         detail::fnum(chart.width - ml - mr) + "\" height=\"" +
         detail::fnum(chart.height - mt - mb) + "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg += "<text x=\"" + detail::fnum((ml + chart.width - mr) / 2.0) + "\" y=\"" +
         detail::fnum(chart.height - 14.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         detail::escape_xml(chart.x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + detail::fnum((mt + chart.height - mb) / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         detail::fnum((mt + chart.height - mb) / 2.0) + ")\">" +
         detail::escape_xml(chart.y_label) + "</text>\n";

  // series paths + markers
  for (const auto& s : chart.series) {
    if (s.line) {
      std::string d;
      bool pen_down = false;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (chart.log_y && s.y[i] <= 0) {
          pen_down = false;
          continue;
        }
        d += (pen_down ? "L" : "M");
        d += detail::fnum(xs.to_px(s.x[i])) + " " + detail::fnum(ys.to_px(s.y[i])) + " ";
        pen_down = true;
      }
      svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.6\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    }
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (chart.log_y && s.y[i] <= 0) continue;
        svg += "<circle cx=\"" + detail::fnum(xs.to_px(s.x[i])) + "\" cy=\"" +
               detail::fnum(ys.to_px(s.y[i])) + "\" r=\"2.8\" fill=\"" + s.color + "\"/>\n";
      }
    }
  }

  // legend
  double ly = mt + 10;
  svg += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (const auto& s : chart.series) {
    double lx = ml + 12;
    svg += "<line x1=\"" + detail::fnum(lx) + "\" y1=\"" + detail::fnum(ly) + "\" x2=\"" +
           detail::fnum(lx + 22) + "\" y2=\"" + detail::fnum(ly) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.6\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
    svg += "<text x=\"" + detail::fnum(lx + 28) + "\" y=\"" + detail::fnum(ly + 4) + "\">" +
           detail::escape_xml(s.label) + "</text>\n";
    ly += 16;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

inline void write_svg(const std::string& path, const SvgChart& chart) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::string body = render_svg(chart);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace nps
