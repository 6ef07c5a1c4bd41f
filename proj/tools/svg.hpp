#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "serialize.hpp"

namespace icg::tool {

// Minimal static line chart: time on x, value on y, one polyline per series.
struct Series {
  std::string label;
  std::string color;
  std::vector<double> values;  // index k is time k + 1
};

inline void write_svg(const std::string& path, const std::vector<Series>& data) {
  constexpr int W = 640, H = 400, M = 46;
  double lo = 0.0, hi = 1.0;
  std::size_t n = 1;
  for (const auto& s : data) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi <= lo) hi = lo + 1.0;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M
      << "\" y2=\"" << H - M << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\""
      << H - M << "\" stroke=\"black\"/>\n";
  auto x_of = [&](std::size_t k) {
    return M + (W - 2.0 * M) * (n > 1 ? static_cast<double>(k) /
                                            static_cast<double>(n - 1)
                                      : 0.5);
  };
  auto y_of = [&](double v) {
    return H - M - (H - 2.0 * M) * (v - lo) / (hi - lo);
  };
  int ly = M;
  for (const auto& s : data) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      if (!std::isfinite(s.values[k])) continue;
      out << fmt(x_of(k)) << ',' << fmt(y_of(s.values[k])) << ' ';
    }
    out << "\"/>\n<text x=\"" << W - M + 4 << "\" y=\"" << ly << "\" fill=\""
        << s.color << "\" font-size=\"11\">" << s.label << "</text>\n";
    ly += 14;
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 8
      << "\" font-size=\"11\">t</text>\n</svg>\n";
}

}  // namespace icg::tool
