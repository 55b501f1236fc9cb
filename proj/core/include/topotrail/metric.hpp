#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topotrail/persistence.hpp"

namespace topotrail {

// Partial matching between diagrams U and V. Every point of U appears once,
// either in `pairs` or in `u_to_diagonal`; likewise for V.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (index in U, index in V)
  std::vector<std::size_t> u_to_diagonal;
  std::vector<std::size_t> v_to_diagonal;
  double cost = 0.0;
};

// Euclidean distance from (birth, death) to its orthogonal projection onto
// the diagonal, (death - birth) / sqrt(2).
double diagonal_distance(const PersistencePair& p) noexcept;

// Sum of Euclidean displacements plus diagonal distances of unmatched
// points, accumulated in canonical order (pairs by U index, then U
// diagonal points, then V diagonal points). Throws ValidationError if the
// matching does not cover both diagrams exactly once.
double matching_cost(const PersistenceDiagram& u, const PersistenceDiagram& v,
                     const Matching& matching);

// Exact minimum-cost partial matching through the diagonal-augmented
// (|U|+|V|) x (|U|+|V|) assignment problem.
Matching optimal_partial_matching(const PersistenceDiagram& u,
                                  const PersistenceDiagram& v);

// 1-Wasserstein distance with Euclidean ground cost. Throws
// ValidationError on a dimension mismatch or an essential point.
double wasserstein(const PersistenceDiagram& u, const PersistenceDiagram& v);

// Sum of squared Wasserstein distances from `mu` to each diagram.
double frechet_energy(const PersistenceDiagram& mu,
                      std::span<const PersistenceDiagram> diagrams);

struct BarycenterOptions {
  std::optional<std::size_t> init_index;  // default: median-size diagram
  double tol = 1e-8;                      // relative energy improvement
  int max_iter = 100;
};

struct BarycenterResult {
  PersistenceDiagram diagram;
  double energy = 0.0;
  int iterations = 0;
  std::vector<double> energy_trace;  // initial energy, then one per accepted step
};

// Index of the diagram whose size is the (lower) median; ties -> lowest index.
std::size_t median_size_index(std::span<const PersistenceDiagram> diagrams);

// Lagrangian Frechet-mean iteration: match the estimate to every diagram,
// move each estimate point to the mean of its images (diagonal projection
// when unmatched), drop points that reach the diagonal, and repeat until
// the relative energy gain falls below `tol`. A step that would raise the
// energy is rejected and ends the iteration.
BarycenterResult barycenter(std::span<const PersistenceDiagram> diagrams,
                            const BarycenterOptions& options = {});

// W(D_i, D_{i+1}) for consecutive diagrams. Needs at least two diagrams.
std::vector<double> wasserstein_series(std::span<const PersistenceDiagram> diagrams);

std::string matching_to_json(const Matching& matching);
// `index,distance` with a header line.
void write_series_csv(std::ostream& out, std::span<const double> series);

}  // namespace topotrail
