#include "topotrail/metric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "topotrail/error.hpp"
#include "topotrail/hungarian.hpp"

namespace topotrail {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double point_distance(const PersistencePair& a, const PersistencePair& b) noexcept {
  return std::hypot(a.birth - b.birth, a.death - b.death);
}

void require_finite(const PersistenceDiagram& d) {
  for (const auto& p : d.pairs) {
    if (!std::isfinite(p.birth) || !std::isfinite(p.death)) {
      throw ValidationError("diagram contains an essential or non-finite point");
    }
  }
}

PersistencePair diagonal_projection(const PersistencePair& p) noexcept {
  const double mid = 0.5 * (p.birth + p.death);
  return {p.dim, mid, mid};
}

double canonical_cost(const PersistenceDiagram& u, const PersistenceDiagram& v,
                      Matching& m) {
  std::sort(m.pairs.begin(), m.pairs.end());
  std::sort(m.u_to_diagonal.begin(), m.u_to_diagonal.end());
  std::sort(m.v_to_diagonal.begin(), m.v_to_diagonal.end());
  double cost = 0.0;
  for (const auto& [i, j] : m.pairs) cost += point_distance(u.pairs[i], v.pairs[j]);
  for (std::size_t i : m.u_to_diagonal) cost += diagonal_distance(u.pairs[i]);
  for (std::size_t j : m.v_to_diagonal) cost += diagonal_distance(v.pairs[j]);
  return cost;
}

}  // namespace

double diagonal_distance(const PersistencePair& p) noexcept {
  return (p.death - p.birth) * kInvSqrt2;
}

double matching_cost(const PersistenceDiagram& u, const PersistenceDiagram& v,
                     const Matching& matching) {
  std::vector<int> seen_u(u.size(), 0), seen_v(v.size(), 0);
  auto mark = [](std::vector<int>& seen, std::size_t i) {
    if (i >= seen.size()) throw ValidationError("matching index out of range");
    ++seen[i];
  };
  for (const auto& [i, j] : matching.pairs) {
    mark(seen_u, i);
    mark(seen_v, j);
  }
  for (std::size_t i : matching.u_to_diagonal) mark(seen_u, i);
  for (std::size_t j : matching.v_to_diagonal) mark(seen_v, j);
  auto once = [](int c) { return c == 1; };
  if (!std::all_of(seen_u.begin(), seen_u.end(), once) ||
      !std::all_of(seen_v.begin(), seen_v.end(), once)) {
    throw ValidationError("matching must cover every point exactly once");
  }
  Matching copy = matching;
  return canonical_cost(u, v, copy);
}

Matching optimal_partial_matching(const PersistenceDiagram& u,
                                  const PersistenceDiagram& v) {
  require_finite(u);
  require_finite(v);
  const std::size_t nu = u.size(), nv = v.size(), n = nu + nv;
  // Rows: U points then one diagonal slot per V point.
  // Columns: V points then one diagonal slot per U point.
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < nu; ++i) {
    const double to_diag = diagonal_distance(u.pairs[i]);
    for (std::size_t j = 0; j < nv; ++j) cost[i * n + j] = point_distance(u.pairs[i], v.pairs[j]);
    for (std::size_t j = nv; j < n; ++j) cost[i * n + j] = to_diag;
  }
  for (std::size_t i = nu; i < n; ++i) {
    for (std::size_t j = 0; j < nv; ++j) cost[i * n + j] = diagonal_distance(v.pairs[j]);
  }

  const auto assignment = solve_assignment(cost, n);
  Matching m;
  for (std::size_t i = 0; i < nu; ++i) {
    if (assignment[i] < nv) m.pairs.emplace_back(i, assignment[i]);
    else m.u_to_diagonal.push_back(i);
  }
  for (std::size_t i = nu; i < n; ++i) {
    if (assignment[i] < nv) m.v_to_diagonal.push_back(assignment[i]);
  }
  m.cost = canonical_cost(u, v, m);
  return m;
}

double wasserstein(const PersistenceDiagram& u, const PersistenceDiagram& v) {
  if (u.dim != v.dim) throw ValidationError("diagrams have different homology dimensions");
  return optimal_partial_matching(u, v).cost;
}

double frechet_energy(const PersistenceDiagram& mu,
                      std::span<const PersistenceDiagram> diagrams) {
  if (diagrams.empty()) throw ValidationError("Frechet energy needs at least one diagram");
  double energy = 0.0;
  for (const auto& d : diagrams) {
    const double w = wasserstein(mu, d);
    energy += w * w;
  }
  return energy;
}

std::size_t median_size_index(std::span<const PersistenceDiagram> diagrams) {
  if (diagrams.empty()) throw ValidationError("no diagrams");
  std::vector<std::size_t> order(diagrams.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return diagrams[a].size() < diagrams[b].size();
  });
  const std::size_t median = diagrams[order[(order.size() - 1) / 2]].size();
  for (std::size_t i = 0; i < diagrams.size(); ++i) {
    if (diagrams[i].size() == median) return i;
  }
  return order[(order.size() - 1) / 2];
}

BarycenterResult barycenter(std::span<const PersistenceDiagram> diagrams,
                            const BarycenterOptions& options) {
  if (diagrams.empty()) throw ValidationError("barycenter needs at least one diagram");
  if (!(options.tol > 0.0)) throw ValidationError("barycenter tol must be positive");
  if (options.max_iter < 1) throw ValidationError("barycenter max_iter must be >= 1");
  const std::size_t init = options.init_index.value_or(median_size_index(diagrams));
  if (init >= diagrams.size()) throw ValidationError("barycenter init_index out of range");
  for (const auto& d : diagrams) {
    if (d.dim != diagrams[init].dim) {
      throw ValidationError("diagrams have different homology dimensions");
    }
    require_finite(d);
  }

  BarycenterResult result;
  PersistenceDiagram mu = diagrams[init];
  double energy = frechet_energy(mu, diagrams);
  result.energy_trace.push_back(energy);
  const double n = static_cast<double>(diagrams.size());

  for (int iter = 0; iter < options.max_iter; ++iter) {
    std::vector<double> sum_birth(mu.size(), 0.0), sum_death(mu.size(), 0.0);
    for (const auto& d : diagrams) {
      const Matching m = optimal_partial_matching(mu, d);
      for (const auto& [i, j] : m.pairs) {
        sum_birth[i] += d.pairs[j].birth;
        sum_death[i] += d.pairs[j].death;
      }
      for (std::size_t i : m.u_to_diagonal) {
        const auto proj = diagonal_projection(mu.pairs[i]);
        sum_birth[i] += proj.birth;
        sum_death[i] += proj.death;
      }
    }
    PersistenceDiagram next;
    next.dim = mu.dim;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double b = sum_birth[i] / n, d = sum_death[i] / n;
      const double scale = std::max({1.0, std::abs(b), std::abs(d)});
      if (d - b > 1e-12 * scale) next.pairs.push_back({mu.dim, b, d});
    }
    ++result.iterations;
    const double next_energy = frechet_energy(next, diagrams);
    if (next_energy > energy) break;
    const double gain = energy - next_energy;
    const double previous = energy;
    mu = std::move(next);
    energy = next_energy;
    result.energy_trace.push_back(energy);
    if (gain <= options.tol * previous) break;
  }
  result.diagram = std::move(mu);
  result.energy = energy;
  return result;
}

std::vector<double> wasserstein_series(std::span<const PersistenceDiagram> diagrams) {
  if (diagrams.size() < 2) throw ValidationError("distance series needs at least two diagrams");
  std::vector<double> series;
  series.reserve(diagrams.size() - 1);
  for (std::size_t i = 0; i + 1 < diagrams.size(); ++i) {
    series.push_back(wasserstein(diagrams[i], diagrams[i + 1]));
  }
  return series;
}

std::string matching_to_json(const Matching& matching) {
  nlohmann::json j;
  j["pairs"] = nlohmann::json::array();
  for (const auto& [a, b] : matching.pairs) j["pairs"].push_back({a, b});
  j["u_to_diagonal"] = matching.u_to_diagonal;
  j["v_to_diagonal"] = matching.v_to_diagonal;
  j["cost"] = matching.cost;
  return j.dump(2);
}

void write_series_csv(std::ostream& out, std::span<const double> series) {
  out << "index,distance\n";
  char buf[32];
  for (std::size_t i = 0; i < series.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), series[i]);
    out << i << ',';
    out.write(buf, ptr - buf);
    out << '\n';
  }
}

}  // namespace topotrail
