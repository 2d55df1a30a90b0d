#pragma once
// Hand-rolled SVG scatter/line plots. No library, no locale, no wall clock:
// identical inputs must give byte-identical files, so every number goes
// through std::to_chars.

#include <obslab/errors.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace obslab {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct FitOverlay {
  bool enabled = false;
  double rate = 0;       // slope in plot coordinates
  double intercept = 0;  // so the overlay is the line y = intercept + rate * x
};

namespace detail {

inline void append_num(std::string& s, double v, int fixed_decimals = -1) {
  char buf[64];
  const auto res = fixed_decimals >= 0
                       ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed,
                                       fixed_decimals)
                       : std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, res.ptr);
}

inline std::string num(double v, int fixed_decimals = -1) {
  std::string s;
  append_num(s, v, fixed_decimals);
  return s;
}

}  // namespace detail

inline std::string render_plot_svg(const std::vector<PlotSeries>& series, const FitOverlay& fit,
                                   const std::string& title, const std::string& xlabel,
                                   const std::string& ylabel) {
  std::size_t total = 0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points)
      if (!std::isfinite(x) || !std::isfinite(y))
        throw InvalidInput("cli_runner", "plot series contain non-finite values");
    total += s.points.size();
  }
  if (total < 2) throw InvalidInput("cli_runner", "plot needs at least 2 points");
  if (fit.enabled && (!std::isfinite(fit.rate) || !std::isfinite(fit.intercept)))
    throw InvalidInput("cli_runner", "fit overlay is not finite");

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (fit.enabled) {
    ymin = std::min({ymin, fit.intercept + fit.rate * xmin, fit.intercept + fit.rate * xmax});
    ymax = std::max({ymax, fit.intercept + fit.rate * xmin, fit.intercept + fit.rate * xmax});
  }
  const double xpad = xmax > xmin ? 0.05 * (xmax - xmin) : 1.0;
  const double ypad = ymax > ymin ? 0.05 * (ymax - ymin) : 1.0;
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double W = 720, H = 480, ml = 80, mr = 20, mt = 40, mb = 60;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
  svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
  // axes
  svg += "<line x1=\"" + detail::num(ml, 2) + "\" y1=\"" + detail::num(H - mb, 2) + "\" x2=\"" +
         detail::num(W - mr, 2) + "\" y2=\"" + detail::num(H - mb, 2) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + detail::num(ml, 2) + "\" y1=\"" + detail::num(mt, 2) + "\" x2=\"" +
         detail::num(ml, 2) + "\" y2=\"" + detail::num(H - mb, 2) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // ticks and labels
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4;
    const double yv = ymin + (ymax - ymin) * i / 4;
    svg += "<line x1=\"" + detail::num(px(xv), 2) + "\" y1=\"" + detail::num(H - mb, 2) +
           "\" x2=\"" + detail::num(px(xv), 2) + "\" y2=\"" + detail::num(H - mb + 5, 2) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::num(px(xv), 2) + "\" y=\"" + detail::num(H - mb + 18, 2) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" +
           detail::num(xv) + "</text>\n";
    svg += "<line x1=\"" + detail::num(ml - 5, 2) + "\" y1=\"" + detail::num(py(yv), 2) +
           "\" x2=\"" + detail::num(ml, 2) + "\" y2=\"" + detail::num(py(yv), 2) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::num(ml - 8, 2) + "\" y=\"" + detail::num(py(yv) + 4, 2) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" +
           detail::num(yv) + "</text>\n";
  }
  svg += "<text x=\"" + detail::num((ml + W - mr) / 2, 2) + "\" y=\"" + detail::num(H - 15, 2) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">" + xlabel +
         "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::num((mt + H - mb) / 2, 2) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 18 " +
         detail::num((mt + H - mb) / 2, 2) + ")\">" + ylabel + "</text>\n";
  svg += "<text x=\"" + detail::num(W / 2, 2) +
         "\" y=\"22\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">" +
         title + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = palette[si % 5];
    if (series[si].points.size() > 1) {
      std::string pts;
      for (const auto& [x, y] : series[si].points) {
        detail::append_num(pts, px(x), 2);
        pts += ',';
        detail::append_num(pts, py(y), 2);
        pts += ' ';
      }
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& [x, y] : series[si].points)
      svg += "<circle cx=\"" + detail::num(px(x), 2) + "\" cy=\"" + detail::num(py(y), 2) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + detail::num(W - mr - 10, 2) + "\" y=\"" +
           detail::num(mt + 16 + 16 * static_cast<double>(si), 2) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\" fill=\"" + color +
           "\">" + series[si].name + "</text>\n";
  }

  if (fit.enabled) {
    svg += "<line x1=\"" + detail::num(px(xmin), 2) + "\" y1=\"" +
           detail::num(py(fit.intercept + fit.rate * xmin), 2) + "\" x2=\"" +
           detail::num(px(xmax), 2) + "\" y2=\"" +
           detail::num(py(fit.intercept + fit.rate * xmax), 2) +
           "\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    svg += "<text x=\"" + detail::num(W - mr - 10, 2) + "\" y=\"" +
           detail::num(mt + 16 + 16 * static_cast<double>(series.size()), 2) +
           "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">rate=" +
           detail::num(fit.rate) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_plot(const std::string& path, const std::vector<PlotSeries>& series,
                      const FitOverlay& fit, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel) {
  const std::string svg = render_plot_svg(series, fit, title, xlabel, ylabel);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cli_runner", "cannot write plot file: " + path);
  out << svg;
  if (!out) throw InvalidInput("cli_runner", "write failed: " + path);
}

}  // namespace obslab
