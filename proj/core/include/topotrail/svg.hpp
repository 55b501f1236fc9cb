#pragma once

#include <iosfwd>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include "topotrail/trajectory.hpp"

namespace topotrail {

struct PlotBounds {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;

  // Grows the box by `fraction` of its extent; degenerate axes get +-0.5.
  PlotBounds padded(double fraction) const;
};

// Minimal SVG writer with a data-to-pixel transform. Output is
// deterministic: numbers are printed with fixed precision.
class SvgPlot {
 public:
  SvgPlot(int width, int height, PlotBounds bounds, std::string title = {});

  void line(double x0, double y0, double x1, double y1, std::string_view color,
            double stroke = 1.0, bool dashed = false);
  void circle(double x, double y, double radius_px, std::string_view color);
  void polyline(std::span<const Point2> points, std::string_view color,
                double stroke = 1.0);
  // Frame with min/max tick labels on both axes.
  void axes(std::string_view x_label, std::string_view y_label);

  double px(double x) const;
  double py(double y) const;

  void write(std::ostream& out) const;

 private:
  int width_;
  int height_;
  PlotBounds bounds_;
  std::string title_;
  std::ostringstream body_;
};

}  // namespace topotrail
