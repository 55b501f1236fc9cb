#include "topotrail/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "topotrail/error.hpp"
#include "topotrail/svg.hpp"

namespace topotrail {
namespace {

using Index = std::uint32_t;
using Column = std::vector<Index>;  // ascending row indices

constexpr Index kNone = static_cast<Index>(-1);

// Maps vertex sets of dimension <= 1 to their position in the filtration.
class FaceIndex {
 public:
  explicit FaceIndex(const Filtration& f) {
    VertexId max_v = 0;
    for (const auto& s : f.simplices) {
      for (VertexId v : s.verts()) max_v = std::max(max_v, v);
    }
    n_ = static_cast<std::size_t>(max_v) + 1;
    vertex_.assign(n_, kNone);
    dense_ = n_ * n_ <= (std::size_t{1} << 24);
    if (dense_) edge_dense_.assign(n_ * n_, kNone);
  }

  void add(const Simplex& s, Index pos) {
    if (s.dim == 0) {
      vertex_[s.vertices[0]] = pos;
    } else if (s.dim == 1) {
      const std::size_t key = s.vertices[0] * n_ + s.vertices[1];
      if (dense_) edge_dense_[key] = pos;
      else edge_sparse_[key] = pos;
    }
  }

  Index vertex(VertexId v) const { return vertex_[v]; }
  Index edge(VertexId a, VertexId b) const {
    const std::size_t key = a * n_ + b;
    if (dense_) return edge_dense_[key];
    const auto it = edge_sparse_.find(key);
    return it == edge_sparse_.end() ? kNone : it->second;
  }

 private:
  std::size_t n_ = 0;
  bool dense_ = true;
  std::vector<Index> vertex_;
  std::vector<Index> edge_dense_;
  std::unordered_map<std::size_t, Index> edge_sparse_;
};

void check_vertices(const Simplex& s, std::size_t pos) {
  if (s.dim < 0 || s.dim > 2) {
    throw ValidationError("simplex " + std::to_string(pos) + " has unsupported dimension");
  }
  const auto v = s.verts();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i - 1] >= v[i]) {
      throw ValidationError("simplex " + std::to_string(pos) +
                            " vertices are not strictly increasing");
    }
  }
}

// Symmetric difference of two sorted columns (addition over Z/2).
void add_column(Column& target, const Column& source, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(),
                                source.end(), std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

Pairing reduce_boundary(const Filtration& filtration) {
  const auto& simplices = filtration.simplices;
  if (simplices.size() >= kNone) throw ValidationError("filtration too large");

  FaceIndex faces(filtration);
  // Reduced non-zero columns, addressed through the row of their lowest entry.
  std::vector<Column> pivots;
  std::vector<Index> pivot_of_low(simplices.size(), kNone);
  std::vector<bool> paired(simplices.size(), false);
  Pairing result;
  Column column, scratch;

  for (std::size_t j = 0; j < simplices.size(); ++j) {
    const Simplex& s = simplices[j];
    check_vertices(s, j);

    column.clear();
    if (s.dim == 1) {
      column = {faces.vertex(s.vertices[0]), faces.vertex(s.vertices[1])};
    } else if (s.dim == 2) {
      const auto& v = s.vertices;
      column = {faces.edge(v[0], v[1]), faces.edge(v[0], v[2]), faces.edge(v[1], v[2])};
    }
    for (Index face : column) {
      if (face == kNone || simplices[face].value > s.value) {
        throw ValidationError("simplex " + std::to_string(j) +
                              " has a face that is missing, later, or enters at a "
                              "larger value");
      }
    }
    std::sort(column.begin(), column.end());

    while (!column.empty() && pivot_of_low[column.back()] != kNone) {
      add_column(column, pivots[pivot_of_low[column.back()]], scratch);
    }
    faces.add(s, static_cast<Index>(j));

    if (!column.empty()) {
      const Index low = column.back();
      pivot_of_low[low] = static_cast<Index>(pivots.size());
      pivots.push_back(column);
      result.pairs.emplace_back(low, j);
      paired[low] = true;
      paired[j] = true;
    }
  }

  for (std::size_t j = 0; j < simplices.size(); ++j) {
    if (!paired[j]) result.essential.push_back(j);
  }
  return result;
}

PersistenceDiagram make_diagram(int dim,
                                std::initializer_list<std::pair<double, double>> points) {
  PersistenceDiagram d;
  d.dim = dim;
  for (const auto& [b, e] : points) d.pairs.push_back({dim, b, e});
  return d;
}

EssentialPolicy default_essential_policy(int k) noexcept {
  return k == 0 ? EssentialPolicy::kCapAtEpsMax : EssentialPolicy::kDrop;
}

PersistenceDiagram persistence_diagram(const Filtration& filtration,
                                       const Pairing& pairing, int k,
                                       DiagramOptions options) {
  if (k != 0 && k != 1) throw ValidationError("homology dimension must be 0 or 1");
  const auto& s = filtration.simplices;
  PersistenceDiagram diagram;
  diagram.dim = k;
  auto keep = [&](double birth, double death) {
    if (options.drop_zero_lifetime && birth == death) return;
    diagram.pairs.push_back({k, birth, death});
  };
  for (const auto& [b, d] : pairing.pairs) {
    if (s[b].dim == k) keep(s[b].value, s[d].value);
  }
  if (options.essential == EssentialPolicy::kCapAtEpsMax) {
    for (std::size_t e : pairing.essential) {
      if (s[e].dim == k) keep(s[e].value, std::max(filtration.eps_max, s[e].value));
    }
  }
  return diagram;
}

PersistenceDiagram persistence_diagram(const Filtration& filtration,
                                       const Pairing& pairing, int k) {
  return persistence_diagram(filtration, pairing, k,
                             {default_essential_policy(k), true});
}

PersistenceDiagram persistence_diagram(const Filtration& filtration, int k) {
  return persistence_diagram(filtration, reduce_boundary(filtration), k);
}

LifetimeDiagram lifetime_diagram(const PersistenceDiagram& diagram) {
  LifetimeDiagram lt;
  lt.points.reserve(diagram.size());
  for (const auto& p : diagram.pairs) {
    if (p.essential()) {
      throw ValidationError("lifetime diagram requires finite deaths");
    }
    lt.points.push_back({p.birth, p.death - p.birth});
  }
  std::sort(lt.points.begin(), lt.points.end(),
            [](const LifetimePoint& a, const LifetimePoint& b) {
              if (a.lifetime != b.lifetime) return a.lifetime < b.lifetime;
              return a.birth < b.birth;
            });
  return lt;
}

Barcode barcode(const PersistenceDiagram& diagram) {
  return barcode(std::vector<PersistenceDiagram>{diagram});
}

Barcode barcode(const std::vector<PersistenceDiagram>& diagrams) {
  Barcode bc;
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) bc.bars.push_back({p.dim, p.birth, p.death});
  }
  std::sort(bc.bars.begin(), bc.bars.end(), [](const Bar& a, const Bar& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return bc;
}

namespace {

nlohmann::json pair_json(const PersistencePair& p) {
  nlohmann::json j = {{"dim", p.dim}, {"birth", p.birth}};
  if (p.essential()) j["death"] = nullptr;
  else j["death"] = p.death;
  return j;
}

std::string_view color_for(int dim) { return dim == 0 ? "black" : "red"; }

}  // namespace

std::string diagram_to_json(const PersistenceDiagram& diagram) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : diagram.pairs) arr.push_back(pair_json(p));
  return arr.dump(2);
}

std::string diagrams_to_json(const std::vector<PersistenceDiagram>& diagrams) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) arr.push_back(pair_json(p));
  }
  return arr.dump(2);
}

PersistenceDiagram diagram_from_json(std::string_view json, int default_dim) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid diagram JSON: ") + e.what());
  }
  if (!arr.is_array()) throw ValidationError("diagram JSON must be an array");
  PersistenceDiagram d;
  d.dim = default_dim;
  bool first = true;
  for (const auto& item : arr) {
    try {
      PersistencePair p;
      p.dim = item.at("dim").get<int>();
      p.birth = item.at("birth").get<double>();
      const auto& death = item.at("death");
      p.death = death.is_null() ? kEssential : death.get<double>();
      if (first) d.dim = p.dim;
      else if (p.dim != d.dim) throw ValidationError("diagram JSON mixes dimensions");
      first = false;
      d.pairs.push_back(p);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("invalid diagram entry: ") + e.what());
    }
  }
  return d;
}

void write_barcode_svg(std::ostream& out, const Barcode& bc) {
  double hi = 0.0;
  for (const auto& b : bc.bars) {
    hi = std::max(hi, b.birth);
    if (!std::isinf(b.death)) hi = std::max(hi, b.death);
  }
  if (!(hi > 0.0)) hi = 1.0;
  const double rows = std::max<double>(1.0, static_cast<double>(bc.bars.size()));
  SvgPlot plot(640, std::max(200, 40 + 6 * static_cast<int>(rows) + 96),
               {0.0, hi * 1.05, 0.0, rows + 1.0}, "barcode");
  for (std::size_t i = 0; i < bc.bars.size(); ++i) {
    const auto& b = bc.bars[i];
    const double y = rows - static_cast<double>(i);
    const double end = std::isinf(b.death) ? hi * 1.05 : b.death;
    plot.line(b.birth, y, end, y, color_for(b.dim), 2.0);
  }
  plot.axes("scale", "feature");
  plot.write(out);
}

void write_diagram_svg(std::ostream& out,
                       const std::vector<PersistenceDiagram>& diagrams) {
  double hi = 0.0;
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) {
      hi = std::max(hi, p.birth);
      if (!p.essential()) hi = std::max(hi, p.death);
    }
  }
  if (!(hi > 0.0)) hi = 1.0;
  const double top = hi * 1.05;
  SvgPlot plot(480, 480, {0.0, top, 0.0, top}, "persistence diagram");
  plot.line(0.0, 0.0, top, top, "#888", 1.0, true);
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) {
      plot.circle(p.birth, p.essential() ? top : p.death, 3.0, color_for(p.dim));
    }
  }
  plot.axes("birth", "death");
  plot.write(out);
}

void write_lifetime_svg(std::ostream& out, const LifetimeDiagram& diagram) {
  double bx = 0.0, ly = 0.0;
  for (const auto& p : diagram.points) {
    bx = std::max(bx, p.birth);
    ly = std::max(ly, p.lifetime);
  }
  if (!(bx > 0.0)) bx = 1.0;
  if (!(ly > 0.0)) ly = 1.0;
  SvgPlot plot(480, 480, {0.0, bx * 1.05, 0.0, ly * 1.05}, "lifetime diagram");
  for (const auto& p : diagram.points) plot.circle(p.birth, p.lifetime, 3.0, "red");
  plot.axes("birth", "lifetime");
  plot.write(out);
}

}  // namespace topotrail
