#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "topotrail/trajectory.hpp"

namespace topotrail {

// Symmetric matrix of pairwise Euclidean distances, stored densely.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return d_[i * n_ + j];
  }
  void set(std::size_t i, std::size_t j, double value) noexcept {
    d_[i * n_ + j] = value;
    d_[j * n_ + i] = value;
  }
  // Largest pairwise distance; 0 for fewer than two points.
  double diameter() const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

DistanceMatrix distance_matrix(std::span<const Point2> points);
DistanceMatrix distance_matrix(const Trajectory& trajectory);

using VertexId = std::uint32_t;

struct Simplex {
  std::array<VertexId, 3> vertices{};  // first dim+1 entries, increasing
  int dim = 0;
  double value = 0.0;  // scale at which the simplex enters

  std::span<const VertexId> verts() const noexcept {
    return {vertices.data(), static_cast<std::size_t>(dim) + 1};
  }

  static Simplex vertex(VertexId v) { return {{v, 0, 0}, 0, 0.0}; }
  static Simplex edge(VertexId a, VertexId b, double value) {
    return {{a, b, 0}, 1, value};
  }
  static Simplex triangle(VertexId a, VertexId b, VertexId c, double value) {
    return {{a, b, c}, 2, value};
  }

  friend bool operator==(const Simplex& a, const Simplex& b) {
    return a.dim == b.dim && a.value == b.value &&
           std::equal(a.verts().begin(), a.verts().end(), b.verts().begin());
  }
};

// Filtration order: value, then dimension, then lexicographic vertices.
bool filtration_less(const Simplex& a, const Simplex& b) noexcept;

struct Filtration {
  std::vector<Simplex> simplices;
  double eps_max = 0.0;

  std::size_t size() const noexcept { return simplices.size(); }
  std::size_t count(int dim) const noexcept;
};

// Rips filtration up to `max_dim` (1 or 2) truncated at `eps_max`.
// Throws ValidationError if eps_max <= 0 or max_dim is not 1 or 2.
Filtration rips_filtration(const DistanceMatrix& dmat, double eps_max,
                           int max_dim = 2);

// Same, with eps_max = diameter. A single point gets eps_max = 0.
Filtration rips_filtration(const DistanceMatrix& dmat, int max_dim = 2);

// Debug dump: one `value dim v0 [v1 [v2]]` line per simplex.
void write_filtration(std::ostream& out, const Filtration& filtration);

}  // namespace topotrail
