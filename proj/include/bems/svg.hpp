#pragma once

// Hand-written standalone SVG: line charts over the 24 hours and a matrix heat map.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "bems/prob_model.hpp"

namespace bems::svg {

struct Series {
  std::string label;
  std::vector<double> values;
  std::string color = "#1f77b4";
  double opacity = 1.0;
};

namespace detail {
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}
}  // namespace detail

inline void line_chart(std::ostream& os, const std::string& title, const std::string& y_label,
                       const std::vector<Series>& series) {
  const double w = 720, h = 400, left = 60, right = 150, top = 40, bottom = 40;
  double lo = 0.0, hi = 1e-9;
  std::size_t n = 2;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (const double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const auto px = [&](std::size_t i) { return left + (w - left - right) * static_cast<double>(i) / static_cast<double>(n - 1); };
  const auto py = [&](double v) { return top + (h - top - bottom) * (hi - v) / (hi - lo); };
  using detail::num;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << py(lo) << "\" x2=\"" << w - right << "\" y2=\"" << py(lo)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    os << "<text x=\"" << left - 6 << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"10\">" << num(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < n; i += 3)
    os << "<text x=\"" << num(px(i)) << "\" y=\"" << h - bottom + 14
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << i << "</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2 << "\" transform=\"rotate(-90 14 " << h / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-opacity=\"" << num(s.opacity)
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) os << (i ? " " : "") << num(px(i)) << "," << num(py(s.values[i]));
    os << "\"/>\n";
    if (!s.label.empty())
      os << "<text x=\"" << w - right + 8 << "\" y=\"" << top + 14 * (k + 1) << "\" fill=\"" << s.color
         << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
}

// Columns are hours, rows are bins (bin 0 at the bottom); darker = more probable.
inline void heat_map(std::ostream& os, const std::string& title, const ProbabilityMatrix& m) {
  const double cell_w = 24, cell_h = 4, left = 40, top = 40;
  const double w = left + cell_w * kHoursPerDay + 20, h = top + cell_h * m.bins() + 30;
  double peak = 1e-12;
  for (int hr = 0; hr < kHoursPerDay; ++hr)
    for (const double p : m.column(hr)) peak = std::max(peak, p);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  for (int hr = 0; hr < kHoursPerDay; ++hr) {
    for (int k = 0; k < m.bins(); ++k) {
      const double p = m.at(k, hr);
      if (p <= 0.0) continue;
      const int shade = 255 - static_cast<int>(255.0 * std::min(1.0, p / peak));
      os << "<rect x=\"" << left + cell_w * hr << "\" y=\"" << top + cell_h * (m.bins() - 1 - k) << "\" width=\""
         << cell_w << "\" height=\"" << cell_h << "\" fill=\"rgb(" << shade << "," << shade << ",255)\"/>\n";
    }
    if (hr % 3 == 0)
      os << "<text x=\"" << left + cell_w * hr + cell_w / 2 << "\" y=\"" << h - 12
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << hr << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace bems::svg
