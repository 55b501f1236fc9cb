#include "topotrail/vectorize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

namespace topotrail {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Standard normal mass on [lo, hi], evaluated on whichever tail keeps the
// subtraction well conditioned.
double normal_mass(double lo, double hi) {
  if (lo >= 0.0) return 0.5 * (std::erfc(lo * kInvSqrt2) - std::erfc(hi * kInvSqrt2));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi * kInvSqrt2) - std::erfc(-lo * kInvSqrt2));
  return 0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2));
}

void check_params(int m, double delta) {
  if (m < 1) throw ValidationError("image resolution must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
}

// Per-centre masses of the M cells along one axis.
std::vector<double> axis_masses(double center, double sigma, double lo, double hi, int m) {
  std::vector<double> masses(static_cast<std::size_t>(m));
  const double step = (hi - lo) / m;
  double prev = (lo - center) / sigma;
  for (int i = 0; i < m; ++i) {
    const double edge = i + 1 == m ? hi : lo + (i + 1) * step;
    const double next = (edge - center) / sigma;
    masses[static_cast<std::size_t>(i)] = normal_mass(prev, next);
    prev = next;
  }
  return masses;
}

}  // namespace

double PersistenceKernel::total_weight() const noexcept {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

PersistenceKernel kernel(const LifetimeDiagram& diagram, int m) {
  if (m < 1) throw ValidationError("image resolution must be >= 1");
  if (diagram.empty()) throw EmptyDiagramError();
  double max_life = 0.0;
  for (const auto& p : diagram.points) max_life = std::max(max_life, p.lifetime);
  if (!(max_life > 0.0) || !std::isfinite(max_life)) {
    throw ValidationError("kernel needs a positive, finite maximal lifetime");
  }
  PersistenceKernel k;
  k.centers = diagram.points;
  k.weights.reserve(diagram.size());
  for (const auto& p : diagram.points) {
    if (p.lifetime < 0.0) throw ValidationError("negative lifetime in diagram");
    k.weights.push_back(p.lifetime / max_life);
  }
  k.sigma = max_life / m;
  return k;
}

double eval_density(const PersistenceKernel& kernel, double birth, double lifetime) {
  const double s2 = kernel.sigma * kernel.sigma;
  const double norm = 1.0 / (2.0 * std::numbers::pi * s2);
  double value = 0.0;
  for (std::size_t i = 0; i < kernel.centers.size(); ++i) {
    const double dx = birth - kernel.centers[i].birth;
    const double dy = lifetime - kernel.centers[i].lifetime;
    value += kernel.weights[i] * norm * std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
  }
  return value;
}

double window_mass(const PersistenceKernel& kernel, const ImageWindow& w) {
  double mass = 0.0;
  for (std::size_t i = 0; i < kernel.centers.size(); ++i) {
    const auto& c = kernel.centers[i];
    const double mx = normal_mass((w.birth_min - c.birth) / kernel.sigma,
                                  (w.birth_max - c.birth) / kernel.sigma);
    const double my = normal_mass((w.lifetime_min - c.lifetime) / kernel.sigma,
                                  (w.lifetime_max - c.lifetime) / kernel.sigma);
    mass += kernel.weights[i] * mx * my;
  }
  return mass;
}

ImageWindow covering_window(const PersistenceKernel& kernel, double delta) {
  if (kernel.centers.empty()) throw EmptyDiagramError();
  ImageWindow box{kernel.centers[0].birth, kernel.centers[0].birth,
                  kernel.centers[0].lifetime, kernel.centers[0].lifetime};
  for (const auto& c : kernel.centers) {
    box.birth_min = std::min(box.birth_min, c.birth);
    box.birth_max = std::max(box.birth_max, c.birth);
    box.lifetime_min = std::min(box.lifetime_min, c.lifetime);
    box.lifetime_max = std::max(box.lifetime_max, c.lifetime);
  }
  const double target = (1.0 - delta) * kernel.total_weight();
  for (double r = 4.0;; r += 0.5) {
    const double pad = r * kernel.sigma;
    const ImageWindow w{box.birth_min - pad, box.birth_max + pad,
                        box.lifetime_min - pad, box.lifetime_max + pad};
    if (window_mass(kernel, w) >= target || r > 64.0) return w;
  }
}

std::optional<ImageWindow> union_window(std::span<const ImageWindow> windows) {
  if (windows.empty()) return std::nullopt;
  ImageWindow u = windows.front();
  for (const auto& w : windows) {
    u.birth_min = std::min(u.birth_min, w.birth_min);
    u.birth_max = std::max(u.birth_max, w.birth_max);
    u.lifetime_min = std::min(u.lifetime_min, w.lifetime_min);
    u.lifetime_max = std::max(u.lifetime_max, w.lifetime_max);
  }
  return u;
}

double PersistenceImage::sum() const noexcept {
  double total = 0.0;
  for (double c : cells) total += c;
  return total;
}

std::optional<ImageWindow> image_window(const LifetimeDiagram& diagram, int m,
                                        double delta) {
  check_params(m, delta);
  if (diagram.empty()) return std::nullopt;
  return covering_window(kernel(diagram, m), delta);
}

PersistenceImage persistence_image(const LifetimeDiagram& diagram, int m, double delta) {
  check_params(m, delta);
  if (diagram.empty()) {
    return {m, std::vector<double>(static_cast<std::size_t>(m) * m, 0.0), {}, delta};
  }
  return persistence_image(diagram, m, delta, *image_window(diagram, m, delta));
}

PersistenceImage persistence_image(const LifetimeDiagram& diagram, int m, double delta,
                                   const ImageWindow& window) {
  check_params(m, delta);
  if (!(window.birth_max > window.birth_min) ||
      !(window.lifetime_max > window.lifetime_min)) {
    throw ValidationError("image window must have positive extent");
  }
  PersistenceImage image{m, std::vector<double>(static_cast<std::size_t>(m) * m, 0.0),
                         window, delta};
  if (diagram.empty()) return image;

  const PersistenceKernel k = kernel(diagram, m);
  if (window_mass(k, window) < (1.0 - delta) * k.total_weight()) {
    throw ValidationError("image window captures less than 1 - delta of the kernel mass");
  }
  for (std::size_t c = 0; c < k.centers.size(); ++c) {
    const auto bx = axis_masses(k.centers[c].birth, k.sigma, window.birth_min,
                                window.birth_max, m);
    const auto ly = axis_masses(k.centers[c].lifetime, k.sigma, window.lifetime_min,
                                window.lifetime_max, m);
    const double w = k.weights[c];
    for (int i = 0; i < m; ++i) {
      const double row = w * bx[static_cast<std::size_t>(i)];
      if (row == 0.0) continue;
      double* out = image.cells.data() + static_cast<std::size_t>(i) * m;
      for (int j = 0; j < m; ++j) out[j] += row * ly[static_cast<std::size_t>(j)];
    }
  }
  return image;
}

std::vector<double> flatten(const PersistenceImage& image) { return image.cells; }

PersistenceImage unflatten(std::span<const double> values, int m,
                           const ImageWindow& window, double delta) {
  if (m < 1 || values.size() != static_cast<std::size_t>(m) * m) {
    throw ValidationError("flattened image length must be m*m");
  }
  return {m, std::vector<double>(values.begin(), values.end()), window, delta};
}

void write_image_csv(std::ostream& out, const PersistenceImage& image) {
  char buf[32];
  for (int i = 0; i < image.m; ++i) {
    for (int j = 0; j < image.m; ++j) {
      if (j > 0) out << ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), image.at(i, j));
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

void write_image_pgm(std::ostream& out, const PersistenceImage& image) {
  double peak = 0.0;
  for (double c : image.cells) peak = std::max(peak, c);
  out << "P2\n" << image.m << ' ' << image.m << "\n255\n";
  for (int i = 0; i < image.m; ++i) {
    for (int j = 0; j < image.m; ++j) {
      const int level =
          peak > 0.0 ? static_cast<int>(std::lround(255.0 * image.at(i, j) / peak)) : 0;
      out << (j > 0 ? " " : "") << level;
    }
    out << '\n';
  }
}

}  // namespace topotrail
