#include "topotrail/svg.hpp"

#include <cstdio>
#include <ostream>

namespace topotrail {
namespace {

constexpr double kMargin = 48.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

PlotBounds PlotBounds::padded(double fraction) const {
  PlotBounds b = *this;
  auto grow = [fraction](double& lo, double& hi) {
    const double span = hi - lo;
    if (!(span > 0.0)) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      lo -= fraction * span;
      hi += fraction * span;
    }
  };
  grow(b.x_min, b.x_max);
  grow(b.y_min, b.y_max);
  return b;
}

SvgPlot::SvgPlot(int width, int height, PlotBounds bounds, std::string title)
    : width_(width), height_(height), bounds_(bounds), title_(std::move(title)) {
  if (!(bounds_.x_max > bounds_.x_min) || !(bounds_.y_max > bounds_.y_min)) {
    bounds_ = bounds_.padded(0.0);
  }
}

double SvgPlot::px(double x) const {
  return kMargin + (x - bounds_.x_min) / (bounds_.x_max - bounds_.x_min) *
                       (width_ - 2.0 * kMargin);
}

double SvgPlot::py(double y) const {
  return height_ - kMargin - (y - bounds_.y_min) / (bounds_.y_max - bounds_.y_min) *
                                 (height_ - 2.0 * kMargin);
}

void SvgPlot::line(double x0, double y0, double x1, double y1,
                   std::string_view color, double stroke, bool dashed) {
  body_ << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(y0)) << "\" x2=\""
        << num(px(x1)) << "\" y2=\"" << num(py(y1)) << "\" stroke=\"" << color
        << "\" stroke-width=\"" << num(stroke) << '"';
  if (dashed) body_ << " stroke-dasharray=\"4 3\"";
  body_ << "/>\n";
}

void SvgPlot::circle(double x, double y, double radius_px, std::string_view color) {
  body_ << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\""
        << num(radius_px) << "\" fill=\"" << color << "\"/>\n";
}

void SvgPlot::polyline(std::span<const Point2> points, std::string_view color,
                       double stroke) {
  body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
        << num(stroke) << "\" points=\"";
  bool first = true;
  for (const auto& p : points) {
    if (!first) body_ << ' ';
    first = false;
    body_ << num(px(p.x)) << ',' << num(py(p.y));
  }
  body_ << "\"/>\n";
}

void SvgPlot::axes(std::string_view x_label, std::string_view y_label) {
  const double left = kMargin, right = width_ - kMargin;
  const double top = kMargin, bottom = height_ - kMargin;
  body_ << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
        << num(right - left) << "\" height=\"" << num(bottom - top)
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
  auto text = [this](double x, double y, std::string_view anchor, std::string_view s) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y)
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"" << anchor
          << "\">" << escape(s) << "</text>\n";
  };
  text(left, bottom + 14, "start", label(bounds_.x_min));
  text(right, bottom + 14, "end", label(bounds_.x_max));
  text(left - 4, bottom, "end", label(bounds_.y_min));
  text(left - 4, top + 8, "end", label(bounds_.y_max));
  text((left + right) / 2, bottom + 30, "middle", x_label);
  body_ << "<text x=\"14\" y=\"" << num((top + bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 14 "
        << num((top + bottom) / 2) << ")\">" << escape(y_label) << "</text>\n";
  if (!title_.empty()) text(width_ / 2.0, 20, "middle", title_);
}

void SvgPlot::write(std::ostream& out) const {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
}

}  // namespace topotrail
