#pragma once

// Tiny SVG polyline plotter for trajectory figures. No dependencies; the CLI
// feeds it plain position arrays pulled through the C API.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwvo_cli {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x, y;
};

class SvgPlot {
 public:
  SvgPlot(int width, int height, std::string title, std::string x_label,
          std::string y_label)
      : width_(width), height_(height), title_(std::move(title)),
        x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void add(Series series) { series_.push_back(std::move(series)); }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << render();
    if (!out) throw std::runtime_error("write failed for " + path);
  }

  std::string render() const {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = max_x;
    for (const auto& s : series_)
      for (size_t i = 0; i < s.x.size(); ++i) {
        min_x = std::min(min_x, s.x[i]);
        max_x = std::max(max_x, s.x[i]);
        min_y = std::min(min_y, s.y[i]);
        max_y = std::max(max_y, s.y[i]);
      }
    if (!(min_x <= max_x)) {
      min_x = 0;
      max_x = 1;
      min_y = 0;
      max_y = 1;
    }
    double span_x = max_x - min_x, span_y = max_y - min_y;
    if (span_x <= 0) span_x = 1;
    if (span_y <= 0) span_y = 1;
    min_x -= span_x * 0.05;
    max_x += span_x * 0.05;
    min_y -= span_y * 0.05;
    max_y += span_y * 0.05;
    span_x = max_x - min_x;
    span_y = max_y - min_y;

    const int margin = 50;
    const double plot_w = width_ - 2 * margin;
    const double plot_h = height_ - 2 * margin;
    auto sx = [&](double x) { return margin + (x - min_x) / span_x * plot_w; };
    auto sy = [&](double y) {
      return height_ - margin - (y - min_y) / span_y * plot_h;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
           "\" viewBox=\"0 0 " + std::to_string(width_) + " " +
           std::to_string(height_) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(width_ / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + title_ +
           "</text>\n";
    // Axes.
    svg += axis_line(margin, height_ - margin, width_ - margin,
                     height_ - margin);
    svg += axis_line(margin, margin, margin, height_ - margin);
    svg += "<text x=\"" + std::to_string(width_ / 2) + "\" y=\"" +
           std::to_string(height_ - 12) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + x_label_ +
           "</text>\n";
    svg += "<text x=\"14\" y=\"" + std::to_string(height_ / 2) +
           "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
           "14 " +
           std::to_string(height_ / 2) + ")\">" + y_label_ + "</text>\n";
    // Tick labels at the corners of the data range.
    svg += tick(margin, height_ - margin + 14, format(min_x));
    svg += tick(width_ - margin, height_ - margin + 14, format(max_x));
    svg += tick(margin - 4, height_ - margin, format(min_y), true);
    svg += tick(margin - 4, margin + 4, format(max_y), true);

    int legend_y = margin + 6;
    for (const auto& s : series_) {
      std::string points;
      for (size_t i = 0; i < s.x.size(); ++i) {
        points += format(sx(s.x[i]));
        points += ',';
        points += format(sy(s.y[i]));
        points += ' ';
      }
      svg += "<polyline fill=\"none\" stroke=\"" + s.color +
             "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      svg += "<rect x=\"" + std::to_string(width_ - margin - 130) + "\" y=\"" +
             std::to_string(legend_y - 9) +
             "\" width=\"12\" height=\"4\" fill=\"" + s.color + "\"/>\n";
      svg += "<text x=\"" + std::to_string(width_ - margin - 112) + "\" y=\"" +
             std::to_string(legend_y - 3) + "\" font-size=\"11\">" + s.label +
             "</text>\n";
      legend_y += 16;
    }
    svg += "</svg>\n";
    return svg;
  }

 private:
  static std::string axis_line(double x1, double y1, double x2, double y2) {
    return "<line x1=\"" + format(x1) + "\" y1=\"" + format(y1) + "\" x2=\"" +
           format(x2) + "\" y2=\"" + format(y2) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }
  static std::string tick(double x, double y, const std::string& text,
                          bool right_align = false) {
    return "<text x=\"" + format(x) + "\" y=\"" + format(y) +
           "\" font-size=\"10\"" +
           (right_align ? " text-anchor=\"end\"" : "") + ">" + text +
           "</text>\n";
  }
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }

  int width_, height_;
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

inline const char* series_color(size_t index) {
  static const std::array<const char*, 7> colors = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
      "#ff7f0e", "#8c564b", "#17becf"};
  return colors[index % colors.size()];
}

}  // namespace uwvo_cli
