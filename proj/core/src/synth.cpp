#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "topotrail/error.hpp"
#include "topotrail/trajectory.hpp"

namespace topotrail {
namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Returns the polygon in counter-clockwise order or throws if it is not a
// non-degenerate convex polygon.
std::vector<Point2> normalized_polygon(std::vector<Point2> poly) {
  if (poly.size() < 3) throw ValidationError("patch polygon needs >= 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw ValidationError("patch polygon has non-finite vertex");
    }
    area2 += a.x * b.y - b.x * a.y;
  }
  if (std::abs(area2) < 1e-12) throw ValidationError("patch polygon is degenerate");
  if (area2 < 0) std::reverse(poly.begin(), poly.end());
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) <= 0.0) {
      throw ValidationError("patch polygon must be strictly convex");
    }
  }
  return poly;
}

// Best & Fisher rejection sampler for the von Mises distribution on
// (-pi, pi] with mean 0.
double sample_von_mises(std::mt19937_64& rng, double kappa) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double pi = std::numbers::pi;
  if (kappa < 1e-8) return pi * (2.0 * unit(rng) - 1.0);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  while (true) {
    const double u1 = unit(rng);
    const double u2 = unit(rng);
    const double u3 = unit(rng);
    const double z = std::cos(pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double angle = std::acos(std::clamp(f, -1.0, 1.0));
      return u3 > 0.5 ? angle : -angle;
    }
  }
}

struct Reflector {
  std::vector<Point2> poly;   // CCW
  std::vector<Point2> inward; // unit inward normal per edge

  explicit Reflector(std::vector<Point2> p) : poly(std::move(p)) {
    const std::size_t n = poly.size();
    inward.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % n];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      inward[i] = {-(b.y - a.y) / len, (b.x - a.x) / len};
    }
  }

  double signed_distance(std::size_t e, Point2 p) const {
    return inward[e].x * (p.x - poly[e].x) + inward[e].y * (p.y - poly[e].y);
  }

  // Moves `pos` by `step`, bouncing off edges. `step` is updated to the
  // final direction of travel.
  void move(Point2& pos, Point2& step) const {
    for (int bounce = 0; bounce < 32; ++bounce) {
      const Point2 target{pos.x + step.x, pos.y + step.y};
      double t_hit = 1.0;
      std::size_t edge = poly.size();
      for (std::size_t e = 0; e < poly.size(); ++e) {
        const double s1 = signed_distance(e, target);
        if (s1 >= 0.0) continue;
        const double s0 = std::max(0.0, signed_distance(e, pos));
        const double t = s0 / (s0 - s1);
        if (t < t_hit || edge == poly.size()) {
          t_hit = t;
          edge = e;
        }
      }
      if (edge == poly.size()) {
        pos = target;
        return;
      }
      pos = {pos.x + t_hit * step.x, pos.y + t_hit * step.y};
      const auto& n = inward[edge];
      const double along = step.x * n.x + step.y * n.y;
      const Point2 mirrored{step.x - 2.0 * along * n.x, step.y - 2.0 * along * n.y};
      if (t_hit >= 1.0) {
        step = mirrored;
        return;
      }
      step = {(1.0 - t_hit) * mirrored.x, (1.0 - t_hit) * mirrored.y};
    }
  }

  // Pulls a point that drifted outside by rounding back onto the polygon.
  Point2 clamp_inside(Point2 p) const {
    for (std::size_t e = 0; e < poly.size(); ++e) {
      const double s = signed_distance(e, p);
      if (s < 0.0) p = {p.x - s * inward[e].x, p.y - s * inward[e].y};
    }
    return p;
  }
};

}  // namespace

bool polygon_contains(const std::vector<Point2>& polygon, Point2 p,
                      double tolerance) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(polygon[i], polygon[(i + 1) % n], p);
    const double len = std::hypot(polygon[(i + 1) % n].x - polygon[i].x,
                                  polygon[(i + 1) % n].y - polygon[i].y);
    if (std::abs(c) <= tolerance * std::max(1.0, len)) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

SynthConfig default_synth_config() {
  SynthConfig config;
  config.patches = {{1, {{0, 0}, {60, 0}, {60, 60}, {0, 60}}, 1.0}};
  config.days_per_regime = 25;
  config.steps_per_day = 1000;
  config.step_length_mean = {1.5, 4.0};
  config.turning_angle_concentration = {2.0, 2.0};
  config.seed = 20240101;
  return config;
}

Dataset generate_synthetic(const SynthConfig& config) {
  if (config.patches.empty()) throw ValidationError("synth config has no patches");
  if (config.days_per_regime <= 0 || config.steps_per_day <= 0) {
    throw ValidationError("synth day and step counts must be positive");
  }
  if (config.step_length_mean.empty() ||
      config.step_length_mean.size() != config.turning_angle_concentration.size()) {
    throw ValidationError(
        "step_length_mean and turning_angle_concentration must be non-empty and "
        "of equal length");
  }
  for (std::size_t r = 0; r < config.step_length_mean.size(); ++r) {
    if (!(config.step_length_mean[r] > 0.0) ||
        !(config.turning_angle_concentration[r] >= 0.0)) {
      throw ValidationError("regime " + std::to_string(r) +
                            " has invalid step length or concentration");
    }
  }
  if (!(config.sample_interval > 0.0)) {
    throw ValidationError("sample_interval must be positive");
  }

  std::vector<Reflector> patches;
  for (const auto& patch : config.patches) {
    if (!(patch.step_scale > 0.0)) throw ValidationError("step_scale must be positive");
    patches.emplace_back(normalized_polygon(patch.polygon));
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double shape = 4.0;

  Dataset dataset;
  const int regimes = static_cast<int>(config.step_length_mean.size());
  for (int r = 1; r < regimes; ++r) {
    dataset.maintenance_dates.push_back(r * config.days_per_regime + 1);
  }

  const int days = regimes * config.days_per_regime;
  for (int day = 1; day <= days; ++day) {
    const int regime = (day - 1) / config.days_per_regime;
    const std::size_t pidx = static_cast<std::size_t>(day - 1) % patches.size();
    const auto& shape_poly = patches[pidx];
    const double mean_step =
        config.step_length_mean[regime] * config.patches[pidx].step_scale;
    const double kappa = config.turning_angle_concentration[regime];
    std::gamma_distribution<double> step_length(shape, mean_step / shape);

    double min_x = shape_poly.poly[0].x, max_x = min_x;
    double min_y = shape_poly.poly[0].y, max_y = min_y;
    for (const auto& v : shape_poly.poly) {
      min_x = std::min(min_x, v.x);
      max_x = std::max(max_x, v.x);
      min_y = std::min(min_y, v.y);
      max_y = std::max(max_y, v.y);
    }
    Point2 pos;
    do {
      pos = {min_x + unit(rng) * (max_x - min_x), min_y + unit(rng) * (max_y - min_y)};
    } while (!polygon_contains(shape_poly.poly, pos, 0.0));
    double heading = 2.0 * std::numbers::pi * unit(rng);

    Trajectory traj;
    traj.day = day;
    traj.patch_id = config.patches[pidx].id;
    traj.period_id = regime;
    traj.points.reserve(static_cast<std::size_t>(config.steps_per_day));
    for (int s = 0; s < config.steps_per_day; ++s) {
      traj.points.push_back({s * config.sample_interval, pos.x, pos.y});
      heading += sample_von_mises(rng, kappa);
      const double len = step_length(rng);
      Point2 step{len * std::cos(heading), len * std::sin(heading)};
      shape_poly.move(pos, step);
      pos = shape_poly.clamp_inside(pos);
      heading = std::atan2(step.y, step.x);
    }
    dataset.trajectories.push_back(std::move(traj));
  }
  return dataset;
}

}  // namespace topotrail
