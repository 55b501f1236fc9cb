#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "topotrail/error.hpp"
#include "topotrail/persistence.hpp"

namespace topotrail {

// Raised by `kernel` for a diagram without points; callers fall back to the
// all-zero image.
class EmptyDiagramError : public ValidationError {
 public:
  EmptyDiagramError() : ValidationError("empty lifetime diagram") {}
};

// Weighted sum of isotropic Gaussians centred at lifetime points. Weights
// are lifetime / max lifetime; sigma is max lifetime / m.
struct PersistenceKernel {
  std::vector<LifetimePoint> centers;
  std::vector<double> weights;
  double sigma = 0.0;

  double total_weight() const noexcept;
};

PersistenceKernel kernel(const LifetimeDiagram& diagram, int m);

double eval_density(const PersistenceKernel& kernel, double birth, double lifetime);

// Rectangle [birth_min, birth_max] x [lifetime_min, lifetime_max].
struct ImageWindow {
  double birth_min = 0.0, birth_max = 1.0;
  double lifetime_min = 0.0, lifetime_max = 1.0;

  friend bool operator==(const ImageWindow&, const ImageWindow&) = default;
};

// Exact kernel mass inside `window`.
double window_mass(const PersistenceKernel& kernel, const ImageWindow& window);

// Bounding box of the centres padded by r*sigma, with r = 4, 4.5, ... the
// first radius capturing at least (1 - delta) of the total weight.
ImageWindow covering_window(const PersistenceKernel& kernel, double delta);

// Smallest window containing all of `windows`; nullopt if none are given.
std::optional<ImageWindow> union_window(std::span<const ImageWindow> windows);

struct PersistenceImage {
  int m = 0;
  std::vector<double> cells;  // row-major; row = birth, column = lifetime
  ImageWindow window;
  double delta = 0.0;

  double at(int i, int j) const { return cells[static_cast<std::size_t>(i) * m + j]; }
  double sum() const noexcept;

  friend bool operator==(const PersistenceImage&, const PersistenceImage&) = default;
};

// Cell values are exact integrals of the kernel density, computed as
// products of 1-D Gaussian CDF differences. An empty diagram yields zeros.
// Throws ValidationError unless m >= 1 and 0 < delta < 1.
PersistenceImage persistence_image(const LifetimeDiagram& diagram, int m, double delta);

// Fixed-window variant for images that must be comparable cell by cell.
// Throws ValidationError if the window captures less than (1 - delta) of
// the kernel mass.
PersistenceImage persistence_image(const LifetimeDiagram& diagram, int m, double delta,
                                   const ImageWindow& window);

// Window `persistence_image` would pick for this diagram, if non-empty.
std::optional<ImageWindow> image_window(const LifetimeDiagram& diagram, int m,
                                        double delta);

std::vector<double> flatten(const PersistenceImage& image);
PersistenceImage unflatten(std::span<const double> values, int m,
                           const ImageWindow& window = {}, double delta = 0.0);

void write_image_csv(std::ostream& out, const PersistenceImage& image);
// Plain (P2) grayscale, scaled so the largest cell is 255.
void write_image_pgm(std::ostream& out, const PersistenceImage& image);

}  // namespace topotrail
