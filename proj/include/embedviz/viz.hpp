/*
 * Copyright 2026 The embedviz Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EMBEDVIZ_VIZ_HPP_
#define EMBEDVIZ_VIZ_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "embedviz/classifiers.hpp"
#include "embedviz/data.hpp"
#include "embedviz/matrix.hpp"
#include "embedviz/parallel.hpp"

// Plain SVG output. Documents carry no timestamps or generated ids, and all
// numbers go through fixed printf formats, so equal inputs give equal bytes.
namespace embedviz {

struct PlotBounds {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  friend bool operator==(const PlotBounds&, const PlotBounds&) = default;
};

// Bounding box of all rows of every matrix, widened by margin * extent on
// each side. Degenerate extents get a unit half-width.
inline PlotBounds bounds_with_margin(std::initializer_list<const Matrix*> sets, double margin = 0.1) {
  bool any = false;
  PlotBounds b{0, 0, 0, 0};
  for (const Matrix* m : sets) {
    for (std::size_t i = 0; m && i < m->rows(); ++i) {
      const double x = (*m)(i, 0), y = (*m)(i, 1);
      if (!any) {
        b = {x, x, y, y};
        any = true;
      }
      b.x_min = std::min(b.x_min, x);
      b.x_max = std::max(b.x_max, x);
      b.y_min = std::min(b.y_min, y);
      b.y_max = std::max(b.y_max, y);
    }
  }
  if (!any) return PlotBounds{};
  auto widen = [margin](double& lo, double& hi) {
    const double extent = hi - lo;
    if (extent <= 0.0) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      lo -= margin * extent;
      hi += margin * extent;
    }
  };
  widen(b.x_min, b.x_max);
  widen(b.y_min, b.y_max);
  return b;
}

// predict_score at cell centres; scores(r, c) is the cell at row r from the
// bottom (y) and column c from the left (x).
struct SurfaceGrid {
  PlotBounds bounds;
  std::size_t resolution = 0;
  Matrix scores;
  double threshold = 0.5;

  double cell_x(std::size_t c) const {
    return bounds.x_min + (static_cast<double>(c) + 0.5) * (bounds.x_max - bounds.x_min) /
                              static_cast<double>(resolution);
  }
  double cell_y(std::size_t r) const {
    return bounds.y_min + (static_cast<double>(r) + 0.5) * (bounds.y_max - bounds.y_min) /
                              static_cast<double>(resolution);
  }
};

inline SurfaceGrid decision_surface(const TrainedModel& model, const PlotBounds& bounds,
                                    std::size_t resolution = 200) {
  if (model.dim() != 2) {
    throw Error(ErrorKind::kDimensionMismatch, "decision surfaces need a model trained on 2-D data");
  }
  detail::require(resolution >= 2, ErrorKind::kInvalidArgument, "resolution must be >= 2");
  SurfaceGrid grid{bounds, resolution, Matrix(resolution, resolution), model.threshold()};
  parallel_for(resolution, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      for (std::size_t c = 0; c < resolution; ++c) {
        const double point[2] = {grid.cell_x(c), grid.cell_y(r)};
        grid.scores(r, c) = model.score_one(point);
      }
    }
  }, 1);
  return grid;
}

struct ScatterStyle {
  std::string title;
  int width = 480;
  int height = 480;
  std::string safe_color = "#440154";    // purple
  std::string failed_color = "#fde725";  // yellow
  double radius = 2.5;
};

struct SurfaceStyle {
  std::string title;
  int width = 360;
  int height = 360;
  std::string safe_color = "#d62728";    // red
  std::string failed_color = "#1f77b4";  // blue
  std::string safe_region = "#f6c6c6";
  std::string failed_region = "#c6d8f6";
  double radius = 2.0;
  double test_opacity = 0.35;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape_xml(std::string_view text) {
  std::string out;
  for (char c : text) {
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

// Plot frame inside a width x height canvas.
struct Frame {
  double left, top, width, height;
  PlotBounds b;

  double sx(double x) const { return left + (x - b.x_min) / (b.x_max - b.x_min) * width; }
  double sy(double y) const { return top + (b.y_max - y) / (b.y_max - b.y_min) * height; }
};

inline Frame make_frame(int width, int height, const PlotBounds& b) {
  return Frame{48.0, 32.0, width - 64.0, height - 72.0, b};
}

inline void open_svg(std::ostringstream& out, int width, int height) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
}

inline void axes(std::ostringstream& out, const Frame& f, const std::string& title) {
  const double bottom = f.top + f.height, right = f.left + f.width;
  out << "<g class=\"axes\" stroke=\"#333333\" stroke-width=\"1\" fill=\"none\">\n"
      << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width)
      << "\" height=\"" << num(f.height) << "\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = f.left + f.width * t / 4.0, y = f.top + f.height * t / 4.0;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(bottom + 4) << "\"/>\n";
    out << "<line x1=\"" << num(f.left - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.left)
        << "\" y2=\"" << num(y) << "\"/>\n";
  }
  out << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#333333\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double x = f.left + f.width * t / 4.0, y = f.top + f.height * t / 4.0;
    const double xv = f.b.x_min + (f.b.x_max - f.b.x_min) * t / 4.0;
    const double yv = f.b.y_max - (f.b.y_max - f.b.y_min) * t / 4.0;
    out << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 14) << "\" text-anchor=\"middle\">"
        << num(xv) << "</text>\n";
    out << "<text x=\"" << num(f.left - 6) << "\" y=\"" << num(y + 3) << "\" text-anchor=\"end\">"
        << num(yv) << "</text>\n";
  }
  out << "</g>\n";
  out << "<text class=\"title\" x=\"" << num(f.left + f.width / 2) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(title) << "</text>\n";
  (void)right;
}

inline void legend(std::ostringstream& out, const Frame& f, bool has_safe, bool has_failed,
                   const std::string& safe_color, const std::string& failed_color) {
  double y = f.top + f.height + 32;
  double x = f.left;
  auto entry = [&](const std::string& color, const char* text) {
    out << "<circle class=\"legend-marker\" cx=\"" << num(x + 5) << "\" cy=\"" << num(y - 4)
        << "\" r=\"4\" fill=\"" << color << "\"/>\n"
        << "<text class=\"legend-label\" x=\"" << num(x + 14) << "\" y=\"" << num(y)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << text << "</text>\n";
    x += 110;
  };
  if (has_safe) entry(safe_color, "safe (-1)");
  if (has_failed) entry(failed_color, "failed (+1)");
}

// Safe points are drawn first so the minority class stays visible on top.
inline void markers(std::ostringstream& out, const Frame& f, const Matrix& points,
                    std::span<const int> labels, const char* css_class, double radius,
                    const std::string& safe_color, const std::string& failed_color, double opacity) {
  for (int pass : {kSafe, kFailed}) {
    for (std::size_t i = 0; i < points.rows(); ++i) {
      if (labels[i] != pass) continue;
      out << "<circle class=\"" << css_class << "\" cx=\"" << num(f.sx(points(i, 0))) << "\" cy=\""
          << num(f.sy(points(i, 1))) << "\" r=\"" << num(radius) << "\" fill=\""
          << (pass == kFailed ? failed_color : safe_color) << '"';
      if (opacity < 1.0) out << " fill-opacity=\"" << num(opacity) << '"';
      out << "/>\n";
    }
  }
}

inline void check_points(const Matrix& points, std::span<const int> labels) {
  require(points.rows() == 0 || points.cols() == 2, ErrorKind::kDimensionMismatch,
          "plots need 2-D points");
  require(points.rows() == labels.size(), ErrorKind::kLengthMismatch, "points and labels differ in length");
  for (double v : points.data()) require(std::isfinite(v), ErrorKind::kNonFinite, "non-finite plot coordinate");
}

}  // namespace detail

// Class-coloured scatter of a 2-D map with axes, legend and title.
inline std::string scatter_svg(const Matrix& points, std::span<const int> labels,
                               const ScatterStyle& style = {}) {
  detail::check_points(points, labels);
  const auto frame = detail::make_frame(style.width, style.height, bounds_with_margin({&points}, 0.05));
  std::ostringstream out;
  detail::open_svg(out, style.width, style.height);
  detail::axes(out, frame, style.title);
  out << "<g class=\"points\">\n";
  detail::markers(out, frame, points, labels, "pt", style.radius, style.safe_color, style.failed_color, 1.0);
  out << "</g>\n";
  const bool has_safe = std::find(labels.begin(), labels.end(), kSafe) != labels.end();
  const bool has_failed = std::find(labels.begin(), labels.end(), kFailed) != labels.end();
  detail::legend(out, frame, has_safe, has_failed, style.safe_color, style.failed_color);
  out << "</svg>\n";
  return out.str();
}

// Two-colour decision regions split at the model threshold, training points
// solid and test points semi-transparent. The region colour covering most
// cells is the background; the other is drawn as per-row runs.
inline std::string surface_svg(const SurfaceGrid& grid, const Matrix& train_points,
                               std::span<const int> train_labels, const Matrix& test_points,
                               std::span<const int> test_labels, const SurfaceStyle& style = {}) {
  detail::check_points(train_points, train_labels);
  detail::check_points(test_points, test_labels);
  const auto frame = detail::make_frame(style.width, style.height, grid.bounds);
  const std::size_t res = grid.resolution;
  std::size_t failed_cells = 0;
  for (double s : grid.scores.data()) failed_cells += s >= grid.threshold ? 1 : 0;
  const bool failed_background = 2 * failed_cells > res * res;

  std::ostringstream out;
  detail::open_svg(out, style.width, style.height);
  out << "<rect class=\"background\" x=\"" << detail::num(frame.left) << "\" y=\"" << detail::num(frame.top)
      << "\" width=\"" << detail::num(frame.width) << "\" height=\"" << detail::num(frame.height)
      << "\" fill=\"" << (failed_background ? style.failed_region : style.safe_region) << "\"/>\n";
  out << "<g class=\"regions\" fill=\"" << (failed_background ? style.safe_region : style.failed_region)
      << "\" shape-rendering=\"crispEdges\">\n";
  const double cell_w = frame.width / static_cast<double>(res);
  const double cell_h = frame.height / static_cast<double>(res);
  for (std::size_t r = 0; r < res; ++r) {
    for (std::size_t c = 0; c < res;) {
      const bool failed = grid.scores(r, c) >= grid.threshold;
      if (failed == failed_background) {
        ++c;
        continue;
      }
      std::size_t end = c;
      while (end < res && (grid.scores(r, end) >= grid.threshold) == failed) ++end;
      const double y_top = frame.top + frame.height - static_cast<double>(r + 1) * cell_h;
      out << "<rect class=\"region\" x=\"" << detail::num(frame.left + static_cast<double>(c) * cell_w)
          << "\" y=\"" << detail::num(y_top) << "\" width=\""
          << detail::num(static_cast<double>(end - c) * cell_w) << "\" height=\"" << detail::num(cell_h)
          << "\"/>\n";
      c = end;
    }
  }
  out << "</g>\n";
  detail::axes(out, frame, style.title);
  out << "<g class=\"points\">\n";
  detail::markers(out, frame, train_points, train_labels, "train", style.radius, style.safe_color,
                  style.failed_color, 1.0);
  detail::markers(out, frame, test_points, test_labels, "test", style.radius, style.safe_color,
                  style.failed_color, style.test_opacity);
  out << "</g>\n";
  const bool has_safe = std::find(train_labels.begin(), train_labels.end(), kSafe) != train_labels.end() ||
                        std::find(test_labels.begin(), test_labels.end(), kSafe) != test_labels.end();
  const bool has_failed =
      std::find(train_labels.begin(), train_labels.end(), kFailed) != train_labels.end() ||
      std::find(test_labels.begin(), test_labels.end(), kFailed) != test_labels.end();
  detail::legend(out, frame, has_safe, has_failed, style.safe_color, style.failed_color);
  out << "</svg>\n";
  return out.str();
}

// Lays standalone panel documents out on a grid, each as a nested <svg>.
inline std::string panel_grid_svg(std::span<const std::string> panels, std::size_t columns, int panel_width,
                                  int panel_height, const std::string& title = {}) {
  detail::require(columns >= 1, ErrorKind::kInvalidArgument, "columns must be >= 1");
  const std::size_t rows = (panels.size() + columns - 1) / columns;
  const int header = title.empty() ? 0 : 28;
  const int width = static_cast<int>(columns) * panel_width;
  const int height = static_cast<int>(rows) * panel_height + header;
  std::ostringstream out;
  detail::open_svg(out, width, height);
  if (!title.empty()) {
    out << "<text class=\"grid-title\" x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << detail::escape_xml(title) << "</text>\n";
  }
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto x = static_cast<int>(p % columns) * panel_width;
    const auto y = static_cast<int>(p / columns) * panel_height + header;
    std::string body = panels[p];
    const std::string open = "<svg xmlns=\"http://www.w3.org/2000/svg\" ";
    if (body.rfind(open, 0) == 0) body.replace(0, open.size(), "<svg ");
    body.replace(0, 4, "<svg class=\"panel\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\"");
    out << body;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace embedviz

#endif  // EMBEDVIZ_VIZ_HPP_
