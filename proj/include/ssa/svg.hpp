#pragma once

// Minimal SVG line/bar charts for experiment outputs. CSV files are the
// data of record; these are for eyeballing.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace ssa::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool bars = false;
};

inline void write_chart(const std::string& path, const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 60, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y1 = 0.0;
  for (const auto& s : series) {
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > 0.0)) y1 = 1.0;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - v / y1 * (H - T - B); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ofstream out(path);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                L, H - B, W - R, H - B, L, T, L, H - B);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.4g</text>"
                "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                L, H - B + 16, x0, W - R, H - B + 16, x1);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                L - 4, T + 4, y1);
  out << buf;
  out << "<text x=\"320\" y=\"410\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"210\" font-size=\"12\" transform=\"rotate(-90 14 210)\" text-anchor=\"middle\">"
      << y_label << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = palette[i % 6];
    if (s.bars && s.x.size() >= 2) {
      const double bw = std::max(1.0, px(s.x[1]) - px(s.x[0]));
      for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j) {
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" opacity=\"0.5\"/>\n",
                      px(s.x[j]), py(s.y[j]), bw, H - B - py(s.y[j]), color);
        out << buf;
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t j = 0; j < s.x.size() && j < s.y.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[j]), py(s.y[j]));
        out << buf;
      }
      out << "\"/>\n";
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" fill=\"%s\">", W - R - 150,
                  T + 14.0 * static_cast<double>(i + 1), color);
    out << buf << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ssa::svg
