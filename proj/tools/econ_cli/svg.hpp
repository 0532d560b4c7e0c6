#pragma once

// Minimal SVG line chart: one polyline, two axes, five ticks per axis.

#include "econ_cli/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace econ::cli
{

struct Series
{
  std::vector<double> x;
  std::vector<double> y;
};

inline std::string render_line_chart(const Series& s, const std::string& title,
                                     const std::string& x_label, const std::string& y_label)
{
  constexpr double width = 640, height = 420;
  constexpr double left = 80, right = 20, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (std::size_t i = 0; i < s.x.size(); ++i)
  {
    if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
    x_min = std::min(x_min, s.x[i]);
    x_max = std::max(x_max, s.x[i]);
    y_min = std::min(y_min, s.y[i]);
    y_max = std::max(y_max, s.y[i]);
  }
  if (!(x_min < x_max)) x_max = x_min + 1.0;
  if (!(y_min < y_max)) y_max = y_min + 1.0;
  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };
  auto num = [](double v) { return format_number(v, 6); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "viewBox=\"0 0 640 420\">\n";
  svg += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + title + "</text>\n";
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
         num(left + plot_w) + "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
         "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i)
  {
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    svg += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
           num(px(xv)) + "\" y2=\"" + num(top + plot_h + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + plot_h + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_number(xv, 4) + "</text>\n";
    svg += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(py(yv)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_number(yv, 4) + "</text>\n";
  }
  svg += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 15) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
         "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " + num(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  svg += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < s.x.size(); ++i)
  {
    if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
    if (!first) svg += " ";
    first = false;
    svg += num(px(s.x[i])) + "," + num(py(s.y[i]));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}
