#include <algorithm>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "topotrail/error.hpp"
#include "topotrail/persistence.hpp"

namespace topotrail {
namespace {

struct Edge {
  double value;
  VertexId a, b;  // a < b
};

bool edge_less(const Edge& x, const Edge& y) {
  if (x.value != y.value) return x.value < y.value;
  if (x.a != y.a) return x.a < y.a;
  return x.b < y.b;
}

// Triangle in filtration order: value, then lexicographic vertices.
struct Tri {
  double value;
  VertexId v[3];

  friend bool operator==(const Tri& x, const Tri& y) {
    return x.value == y.value && x.v[0] == y.v[0] && x.v[1] == y.v[1] && x.v[2] == y.v[2];
  }
  friend bool operator<(const Tri& x, const Tri& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.v[0] != y.v[0]) return x.v[0] < y.v[0];
    if (x.v[1] != y.v[1]) return x.v[1] < y.v[1];
    return x.v[2] < y.v[2];
  }
};

struct TriHash {
  std::size_t operator()(const Tri& t) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (VertexId v : t.v) h = (h ^ v) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

class CoboundaryReducer {
 public:
  CoboundaryReducer(const DistanceMatrix& dmat, double eps_max)
      : d_(dmat), n_(static_cast<VertexId>(dmat.size())), eps_(eps_max) {}

  // Triangles e + {k} that exist at eps_max, in filtration order.
  void coboundary(const Edge& e, std::vector<Tri>& out) const {
    out.clear();
    for (VertexId k = 0; k < n_; ++k) {
      if (k == e.a || k == e.b) continue;
      const double value = std::max({e.value, d_(e.a, k), d_(e.b, k)});
      if (value > eps_) continue;
      out.push_back(make_tri(value, e.a, e.b, k));
    }
    std::sort(out.begin(), out.end());
  }

  // Filtration-minimal triangle of the coboundary; false if it is empty.
  bool min_coface(const Edge& e, Tri& best) const {
    bool found = false;
    for (VertexId k = 0; k < n_; ++k) {
      if (k == e.a || k == e.b) continue;
      const double value = std::max({e.value, d_(e.a, k), d_(e.b, k)});
      if (value > eps_) continue;
      const Tri t = make_tri(value, e.a, e.b, k);
      if (!found || t < best) {
        best = t;
        found = true;
      }
    }
    return found;
  }

  // The facet of t that enters last in filtration order.
  Edge last_facet(const Tri& t) const {
    const Edge f[3] = {{d_(t.v[0], t.v[1]), t.v[0], t.v[1]},
                       {d_(t.v[0], t.v[2]), t.v[0], t.v[2]},
                       {d_(t.v[1], t.v[2]), t.v[1], t.v[2]}};
    Edge best = f[0];
    for (const auto& e : f) {
      if (edge_less(best, e)) best = e;
    }
    return best;
  }

 private:
  static Tri make_tri(double value, VertexId a, VertexId b, VertexId k) {
    Tri t{value, {a, b, k}};
    std::sort(std::begin(t.v), std::end(t.v));
    return t;
  }

  const DistanceMatrix& d_;
  VertexId n_;
  double eps_;
};

void xor_into(std::vector<Tri>& target, const std::vector<Tri>& source,
              std::vector<Tri>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(),
                                source.end(), std::back_inserter(scratch));
  target.swap(scratch);
}

void xor_ids(std::vector<std::uint32_t>& target, const std::vector<std::uint32_t>& source) {
  std::vector<std::uint32_t> out;
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(),
                                source.end(), std::back_inserter(out));
  target.swap(out);
}

}  // namespace

RipsDiagrams rips_persistence(const DistanceMatrix& dmat, double eps_max,
                              DiagramOptions h0_options, DiagramOptions h1_options) {
  if (!(eps_max > 0.0)) throw ValidationError("eps_max must be positive");
  const auto n = static_cast<VertexId>(dmat.size());

  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) {
    for (VertexId j = i + 1; j < n; ++j) {
      if (dmat(i, j) <= eps_max) edges.push_back({dmat(i, j), i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), edge_less);

  RipsDiagrams out;
  out.h0.dim = 0;
  out.h1.dim = 1;
  auto emit = [](PersistenceDiagram& d, const DiagramOptions& opt, double b, double e) {
    if (opt.drop_zero_lifetime && b == e) return;
    d.pairs.push_back({d.dim, b, e});
  };

  // Components: the elder rule pairs every merging edge with a vertex born at 0.
  UnionFind uf(n);
  std::vector<bool> merging(edges.size(), false);
  std::size_t components = n;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (uf.unite(edges[e].a, edges[e].b)) {
      merging[e] = true;
      --components;
      emit(out.h0, h0_options, 0.0, edges[e].value);
    }
  }
  if (h0_options.essential == EssentialPolicy::kCapAtEpsMax) {
    for (std::size_t c = 0; c < components; ++c) emit(out.h0, h0_options, 0.0, eps_max);
  }

  // Edge id for apparent-pair detection.
  std::unordered_map<std::uint64_t, std::uint32_t> edge_id;
  edge_id.reserve(edges.size() * 2);
  auto key = [n](VertexId a, VertexId b) {
    return static_cast<std::uint64_t>(a) * n + b;
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    edge_id.emplace(key(edges[e].a, edges[e].b), static_cast<std::uint32_t>(e));
  }

  CoboundaryReducer reducer(dmat, eps_max);
  // Pivot triangle -> edges whose coboundaries sum to the reduced column.
  std::unordered_map<Tri, std::vector<std::uint32_t>, TriHash> owner;
  std::vector<Tri> column, addend, scratch;

  for (std::size_t r = edges.size(); r-- > 0;) {
    if (merging[r]) continue;  // cleared: its reduced coboundary is zero
    const Edge& e = edges[r];

    Tri pivot;
    if (!reducer.min_coface(e, pivot)) {
      if (h1_options.essential == EssentialPolicy::kCapAtEpsMax) {
        emit(out.h1, h1_options, e.value, eps_max);
      }
      continue;
    }
    const Edge last = reducer.last_facet(pivot);
    if (owner.find(pivot) == owner.end() && last.a == e.a && last.b == e.b) {
      owner.emplace(pivot, std::vector<std::uint32_t>{static_cast<std::uint32_t>(r)});
      emit(out.h1, h1_options, e.value, pivot.value);
      continue;
    }

    std::vector<std::uint32_t> combination{static_cast<std::uint32_t>(r)};
    reducer.coboundary(e, column);
    bool paired = false;
    while (!column.empty()) {
      const auto it = owner.find(column.front());
      if (it == owner.end()) {
        emit(out.h1, h1_options, e.value, column.front().value);
        owner.emplace(column.front(), std::move(combination));
        paired = true;
        break;
      }
      const std::vector<std::uint32_t> other = it->second;
      for (std::uint32_t id : other) {
        reducer.coboundary(edges[id], addend);
        xor_into(column, addend, scratch);
      }
      std::sort(combination.begin(), combination.end());
      auto sorted_other = other;
      std::sort(sorted_other.begin(), sorted_other.end());
      xor_ids(combination, sorted_other);
    }
    if (!paired && h1_options.essential == EssentialPolicy::kCapAtEpsMax) {
      emit(out.h1, h1_options, e.value, eps_max);
    }
  }
  return out;
}

RipsDiagrams rips_persistence(const DistanceMatrix& dmat) {
  const double diam = dmat.diameter();
  if (diam > 0.0) return rips_persistence(dmat, diam);
  RipsDiagrams out;
  out.h0.dim = 0;
  out.h1.dim = 1;
  return out;
}

}  // namespace topotrail
