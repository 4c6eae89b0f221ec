#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/text.hpp"

namespace gprloc {

// Small deterministic line plotter. Everything is emitted with
// shortest-round-trip number formatting so identical data gives identical
// bytes.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void add_series(const std::string& name, const std::vector<double>& x,
                  const std::vector<double>& y) {
    if (x.size() != y.size()) throw InputError("SvgPlot: series length mismatch");
    series_.push_back({name, x, y, false});
  }

  void add_marker(const std::string& name, double x, double y) {
    series_.push_back({name, {x}, {y}, true});
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << render();
  }

  std::string render() const {
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series_) {
      for (double v : s.x) {
        x_min = std::min(x_min, v);
        x_max = std::max(x_max, v);
      }
      for (double v : s.y) {
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
      }
    }
    if (x_min > x_max) {
      x_min = 0;
      x_max = 1;
      y_min = 0;
      y_max = 1;
    }
    if (x_max - x_min < 1e-12) {
      x_min -= 0.5;
      x_max += 0.5;
    }
    if (y_max - y_min < 1e-12) {
      y_min -= 0.5;
      y_max += 0.5;
    }

    const double w = 720, h = 440;
    const double ml = 70, mr = 160, mt = 40, mb = 50;
    auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * (w - ml - mr); };
    auto sy = [&](double v) { return h - mb - (v - y_min) / (y_max - y_min) * (h - mt - mb); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    o << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"15\">" << title_ << "</text>\n";

    // frame and ticks
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr) << "\" height=\""
      << (h - mt - mb) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double fx = x_min + (x_max - x_min) * i / 5.0;
      const double fy = y_min + (y_max - y_min) * i / 5.0;
      o << "<line x1=\"" << sx(fx) << "\" y1=\"" << (h - mb) << "\" x2=\"" << sx(fx) << "\" y2=\""
        << (h - mb + 5) << "\" stroke=\"#444\"/>\n";
      o << "<text x=\"" << sx(fx) << "\" y=\"" << (h - mb + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(fx)
        << "</text>\n";
      o << "<line x1=\"" << (ml - 5) << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml << "\" y2=\""
        << sy(fy) << "\" stroke=\"#444\"/>\n";
      o << "<text x=\"" << (ml - 8) << "\" y=\"" << (sy(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(fy)
        << "</text>\n";
    }
    o << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel_
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << (mt + (h - mt - mb) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
      << " transform=\"rotate(-90 16 " << (mt + (h - mt - mb) / 2) << ")\">" << ylabel_
      << "</text>\n";

    int color_idx = 0;
    double legend_y = mt + 14;
    for (const auto& s : series_) {
      const std::string color = kPalette[color_idx % kPaletteSize];
      ++color_idx;
      if (s.marker) {
        o << "<circle cx=\"" << sx(s.x[0]) << "\" cy=\"" << sy(s.y[0])
          << "\" r=\"5\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      } else {
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (i) o << ' ';
          o << coord(sx(s.x[i])) << ',' << coord(sy(s.y[i]));
        }
        o << "\"/>\n";
      }
      o << "<rect x=\"" << (w - mr + 10) << "\" y=\"" << (legend_y - 9)
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
      o << "<text x=\"" << (w - mr + 27) << "\" y=\"" << legend_y
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
      legend_y += 18;
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
    bool marker = false;
  };

  static std::string coord(double v) {
    // Plot coordinates rounded to 1/100 px: stable and compact.
    return format_double(std::round(v * 100.0) / 100.0);
  }

  static std::string tick(double v) {
    const double r = std::round(v * 1e6) / 1e6;
    return format_double(r == 0.0 ? 0.0 : r);  // avoid "-0"
  }

  static constexpr const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b"};
  static constexpr int kPaletteSize = 6;

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

}  // namespace gprloc
