#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topotrail/rips.hpp"

namespace topotrail {

// Result of reducing the boundary matrix of a filtration over Z/2.
// Indices refer to positions in Filtration::simplices.
struct Pairing {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (birth, death)
  std::vector<std::size_t> essential;                      // never killed
};

// Left-to-right column reduction. Throws ValidationError if a simplex has a
// face that is missing, appears later, or enters at a larger value.
Pairing reduce_boundary(const Filtration& filtration);

inline constexpr double kEssential = std::numeric_limits<double>::infinity();

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kEssential;

  bool essential() const noexcept { return std::isinf(death); }
  double lifetime() const noexcept { return death - birth; }

  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  int dim = 1;
  std::vector<PersistencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;
};

// Builds a diagram from (birth, death) coordinates.
PersistenceDiagram make_diagram(int dim,
                                std::initializer_list<std::pair<double, double>> points);

enum class EssentialPolicy { kCapAtEpsMax, kDrop };

// Capped for H0 (one component survives), dropped for H1.
EssentialPolicy default_essential_policy(int k) noexcept;

struct DiagramOptions {
  EssentialPolicy essential = EssentialPolicy::kDrop;
  bool drop_zero_lifetime = true;
};

// Pairs of homology dimension k (0 or 1) mapped to filtration values.
PersistenceDiagram persistence_diagram(const Filtration& filtration,
                                       const Pairing& pairing, int k,
                                       DiagramOptions options);
PersistenceDiagram persistence_diagram(const Filtration& filtration,
                                       const Pairing& pairing, int k);
// Reduces `filtration` and applies the default policy for k.
PersistenceDiagram persistence_diagram(const Filtration& filtration, int k);

struct LifetimePoint {
  double birth = 0.0;
  double lifetime = 0.0;

  friend bool operator==(const LifetimePoint&, const LifetimePoint&) = default;
};

// Points (a, b - a), ascending by lifetime (birth breaks ties).
struct LifetimeDiagram {
  std::vector<LifetimePoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  double max_lifetime() const noexcept {
    return points.empty() ? 0.0 : points.back().lifetime;
  }
};

// Throws ValidationError if the diagram still holds an essential class.
LifetimeDiagram lifetime_diagram(const PersistenceDiagram& diagram);

struct Bar {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;

  friend bool operator==(const Bar&, const Bar&) = default;
};

struct Barcode {
  std::vector<Bar> bars;  // sorted by (dim, birth, death)
};

Barcode barcode(const PersistenceDiagram& diagram);
Barcode barcode(const std::vector<PersistenceDiagram>& diagrams);

// JSON array of {"dim", "birth", "death"}; essential deaths are null.
std::string diagram_to_json(const PersistenceDiagram& diagram);
std::string diagrams_to_json(const std::vector<PersistenceDiagram>& diagrams);
// Inverse of diagram_to_json. All entries must share one dimension; an
// empty array yields a diagram of `default_dim`.
PersistenceDiagram diagram_from_json(std::string_view json, int default_dim = 1);

// Horizontal bars against scale; H0 black, H1 red. Essential bars run to
// the right edge.
void write_barcode_svg(std::ostream& out, const Barcode& barcode);
// Birth/death scatter with the diagonal; H0 black, H1 red.
void write_diagram_svg(std::ostream& out,
                       const std::vector<PersistenceDiagram>& diagrams);
void write_lifetime_svg(std::ostream& out, const LifetimeDiagram& diagram);

}  // namespace topotrail

namespace topotrail {

struct RipsDiagrams {
  PersistenceDiagram h0;
  PersistenceDiagram h1;
};

// H0 and H1 of the Rips filtration of `dmat` up to `eps_max` without
// materializing triangles: components by union-find over edges in
// filtration order, loops by reducing edge coboundaries in reverse
// filtration order, skipping component-merging edges and pairing apparent
// pairs without reduction. Produces the same pairs as reduce_boundary on
// rips_filtration(dmat, eps_max, 2).
RipsDiagrams rips_persistence(const DistanceMatrix& dmat, double eps_max,
                              DiagramOptions h0_options = {EssentialPolicy::kCapAtEpsMax, true},
                              DiagramOptions h1_options = {EssentialPolicy::kDrop, true});
// eps_max = diameter.
RipsDiagrams rips_persistence(const DistanceMatrix& dmat);

}  // namespace topotrail
