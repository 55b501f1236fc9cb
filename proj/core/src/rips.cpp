#include "topotrail/rips.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "topotrail/error.hpp"

namespace topotrail {

double DistanceMatrix::diameter() const noexcept {
  double best = 0.0;
  for (double v : d_) best = std::max(best, v);
  return best;
}

DistanceMatrix distance_matrix(std::span<const Point2> points) {
  DistanceMatrix dmat(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      dmat.set(i, j, std::hypot(points[i].x - points[j].x, points[i].y - points[j].y));
    }
  }
  return dmat;
}

DistanceMatrix distance_matrix(const Trajectory& trajectory) {
  std::vector<Point2> pts;
  pts.reserve(trajectory.points.size());
  for (const auto& p : trajectory.points) pts.push_back({p.x, p.y});
  return distance_matrix(pts);
}

bool filtration_less(const Simplex& a, const Simplex& b) noexcept {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return std::lexicographical_compare(a.verts().begin(), a.verts().end(),
                                      b.verts().begin(), b.verts().end());
}

std::size_t Filtration::count(int dim) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      simplices.begin(), simplices.end(),
      [dim](const Simplex& s) { return s.dim == dim; }));
}

Filtration rips_filtration(const DistanceMatrix& dmat, double eps_max,
                           int max_dim) {
  if (!(eps_max > 0.0)) throw ValidationError("eps_max must be positive");
  if (max_dim != 1 && max_dim != 2) throw ValidationError("max_dim must be 1 or 2");

  const auto n = static_cast<VertexId>(dmat.size());
  Filtration f;
  f.eps_max = eps_max;
  for (VertexId i = 0; i < n; ++i) f.simplices.push_back(Simplex::vertex(i));
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      if (dmat(i, j) <= eps_max) f.simplices.push_back(Simplex::edge(i, j, dmat(i, j)));
    }
  }
  if (max_dim == 2) {
    for (VertexId i = 0; i < n; ++i) {
      for (VertexId j = i + 1; j < n; ++j) {
        const double dij = dmat(i, j);
        if (dij > eps_max) continue;
        for (VertexId k = j + 1; k < n; ++k) {
          const double value = std::max({dij, dmat(i, k), dmat(j, k)});
          if (value <= eps_max) f.simplices.push_back(Simplex::triangle(i, j, k, value));
        }
      }
    }
  }
  std::sort(f.simplices.begin(), f.simplices.end(), filtration_less);
  return f;
}

Filtration rips_filtration(const DistanceMatrix& dmat, int max_dim) {
  const double diam = dmat.diameter();
  if (diam > 0.0) return rips_filtration(dmat, diam, max_dim);
  if (max_dim != 1 && max_dim != 2) throw ValidationError("max_dim must be 1 or 2");
  // All points coincide (or there is only one): every simplex enters at 0.
  Filtration f = rips_filtration(dmat, 1.0, max_dim);
  f.eps_max = 0.0;
  return f;
}

void write_filtration(std::ostream& out, const Filtration& filtration) {
  char buf[32];
  for (const auto& s : filtration.simplices) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), s.value);
    out.write(buf, ptr - buf);
    out << ' ' << s.dim;
    for (VertexId v : s.verts()) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace topotrail
