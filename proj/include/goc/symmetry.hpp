#pragma once

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "goc/board.hpp"

namespace goc {

enum class CellClass { Self, Part, Nowhere };

inline const char* cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::Self: return "SELF";
    case CellClass::Part: return "PART";
    case CellClass::Nowhere: return "NOWHERE";
  }
  return "?";
}

// A non-identity, self-inverse automorphism of the board that maps cells to cells.
struct Involution {
  std::vector<VertexId> vertex_map;
  std::vector<EdgeId> edge_map;
  std::vector<CellId> cell_map;
  std::vector<CellClass> cell_class;

  bool edge_is_self(EdgeId e) const { return edge_map[e] == e; }

  std::vector<EdgeId> self_involutive_edges() const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < static_cast<EdgeId>(edge_map.size()); ++e)
      if (edge_map[e] == e) out.push_back(e);
    return out;
  }

  bool cells_self_or_nowhere() const {
    return std::none_of(cell_class.begin(), cell_class.end(), [](CellClass c) { return c == CellClass::Part; });
  }

  // A self-involutive edge whose endpoints are swapped rather than fixed.
  bool edge_flipped(const Board& b, EdgeId e) const {
    const auto& r = b.edge(e);
    return edge_map[e] == e && vertex_map[r.u] == r.v;
  }

  // Every cell is mapped onto a different cell or reflected within itself.
  bool moves_every_cell(const Board& b) const {
    for (CellId c = 0; c < b.cell_count(); ++c) {
      if (cell_map[c] != c) continue;
      bool moved = false;
      for (VertexId v : b.cell(c).walk) moved |= vertex_map[v] != v;
      if (!moved) return false;
    }
    return true;
  }
};

namespace detail {

inline std::set<EdgeId> cell_edge_set(const CellRecord& c) { return {c.edges.begin(), c.edges.end()}; }

inline std::optional<Involution> complete_involution(const Board& b, const std::vector<VertexId>& vmap) {
  Involution inv;
  inv.vertex_map = vmap;
  for (const auto& e : b.edges()) {
    auto img = b.find_edge(vmap[e.u], vmap[e.v]);
    if (!img) return std::nullopt;
    inv.edge_map.push_back(*img);
  }
  std::map<std::set<EdgeId>, CellId> by_edges;
  for (const auto& c : b.cells()) by_edges.emplace(cell_edge_set(c), c.id);
  for (const auto& c : b.cells()) {
    std::set<EdgeId> image;
    for (EdgeId e : c.edges) image.insert(inv.edge_map[e]);
    auto it = by_edges.find(image);
    if (it == by_edges.end()) return std::nullopt;
    inv.cell_map.push_back(it->second);
  }
  for (const auto& c : b.cells()) {
    if (inv.cell_map[c.id] == c.id) {
      inv.cell_class.push_back(CellClass::Self);
      continue;
    }
    const auto own = cell_edge_set(c);
    const bool part = std::any_of(c.edges.begin(), c.edges.end(),
                                  [&](EdgeId e) { return own.contains(inv.edge_map[e]); });
    inv.cell_class.push_back(part ? CellClass::Part : CellClass::Nowhere);
  }
  return inv;
}

}  // namespace detail

inline constexpr int kInvolutionVertexGuard = 16;

/// All involutive symmetries of a small board by degree-partitioned backtracking.
///
/// Vertices are assigned in id order; each unassigned vertex v is paired with
/// itself or with a later unassigned vertex of equal degree, and the partial
/// map must send every edge between assigned vertices to an edge. Complete
/// maps are kept when they also permute the cells. Results come out in
/// lexicographic order of vertex_map.
inline std::vector<Involution> find_involutions(const Board& b, int max_vertices = kInvolutionVertexGuard) {
  const int n = b.vertex_count();
  if (n > max_vertices)
    throw UnsupportedBoard("involution search is limited to " + std::to_string(max_vertices) + " vertices, board has " +
                           std::to_string(n));
  std::vector<Involution> out;
  std::vector<VertexId> map(n, -1);

  auto consistent = [&](VertexId v) {
    for (EdgeId e : b.incident(v)) {
      const VertexId x = b.edge(e).other(v);
      if (map[x] >= 0 && !b.find_edge(map[v], map[x])) return false;
    }
    return true;
  };

  std::function<void(VertexId)> assign = [&](VertexId from) {
    VertexId v = from;
    while (v < n && map[v] >= 0) ++v;
    if (v == n) {
      bool identity = true;
      for (VertexId i = 0; i < n; ++i) identity &= map[i] == i;
      if (identity) return;
      if (auto inv = detail::complete_involution(b, map)) out.push_back(std::move(*inv));
      return;
    }
    for (VertexId w = v; w < n; ++w) {
      if (map[w] >= 0 || b.degree(w) != b.degree(v)) continue;
      map[v] = w;
      map[w] = v;
      if (consistent(v) && (w == v || consistent(w))) assign(v + 1);
      map[v] = -1;
      map[w] = -1;
    }
  };
  assign(0);
  return out;
}

// ---------------------------------------------------------------------------
// Per-cycle reflection axes

enum class AxisKind { VertexEdge, VertexVertex, EdgeEdge };

struct Axis {
  CellId cycle = 0;
  int reflection = 0;  // walk position i maps to (reflection - i) mod m
  std::vector<VertexId> fixed_vertices;
  std::vector<EdgeId> fixed_edges;  // the self-involutive edges
  std::map<VertexId, VertexId> vertex_partner;
  std::map<EdgeId, EdgeId> edge_partner;

  AxisKind kind() const {
    if (fixed_vertices.size() == 2) return AxisKind::VertexVertex;
    if (fixed_edges.size() == 2) return AxisKind::EdgeEdge;
    return AxisKind::VertexEdge;
  }
  const std::vector<EdgeId>& self_involutive_edges() const { return fixed_edges; }
  bool fixes(VertexId v) const { return std::find(fixed_vertices.begin(), fixed_vertices.end(), v) != fixed_vertices.end(); }
  VertexId partner(VertexId v) const { return vertex_partner.at(v); }
  EdgeId partner_edge(EdgeId e) const { return edge_partner.at(e); }
};

inline Axis make_axis(const Board& b, CellId cid, int k) {
  const auto& c = b.cell(cid);
  const int m = static_cast<int>(c.length());
  Axis a;
  a.cycle = cid;
  a.reflection = ((k % m) + m) % m;
  for (int i = 0; i < m; ++i) {
    const int j = ((a.reflection - i) % m + m) % m;
    a.vertex_partner[c.walk[i]] = c.walk[j];
    if (i == j) a.fixed_vertices.push_back(c.walk[i]);
    const int ej = ((a.reflection - i - 1) % m + m) % m;
    a.edge_partner[c.edges[i]] = c.edges[ej];
    if (i == ej) a.fixed_edges.push_back(c.edges[i]);
  }
  std::sort(a.fixed_vertices.begin(), a.fixed_vertices.end());
  std::sort(a.fixed_edges.begin(), a.fixed_edges.end());
  return a;
}

/// All m reflections of one cycle cell, ordered by lowest fixed vertex id,
/// then lowest fixed edge id.
inline std::vector<Axis> enumerate_axes(const Board& b, CellId cid) {
  if (cid < 0 || cid >= b.cell_count()) throw InvalidArgument("unknown cell " + std::to_string(cid));
  const auto& c = b.cell(cid);
  for (EdgeId e : c.edges)
    if (b.edge_cells(e).size() != 1)
      throw UnsupportedBoard("edge " + std::to_string(e) + " of cell " + std::to_string(cid) + " is shared with another cell");
  std::vector<Axis> axes;
  for (int k = 0; k < static_cast<int>(c.length()); ++k) axes.push_back(make_axis(b, cid, k));
  auto key = [](const Axis& a) {
    return std::pair{a.fixed_vertices.empty() ? INT_MAX : a.fixed_vertices.front(),
                     a.fixed_edges.empty() ? INT_MAX : a.fixed_edges.front()};
  };
  std::stable_sort(axes.begin(), axes.end(), [&](const Axis& x, const Axis& y) { return key(x) < key(y); });
  return axes;
}

// High-degree vertices are partnered only with high-degree vertices.
inline bool axis_property1(const Board& b, const Axis& a) {
  for (auto [v, w] : a.vertex_partner)
    if ((b.degree(v) >= 4) != (b.degree(w) >= 4)) return false;
  return true;
}

enum class Parity { Even, Odd };

inline const char* parity_name(Parity p) { return p == Parity::Even ? "EVEN" : "ODD"; }

struct AxisSet {
  std::vector<Axis> axes;  // indexed by cell id
  bool property1_ok = false;
  bool property2_ok = false;
  std::vector<EdgeId> si_edges;
  Parity si_parity = Parity::Even;

  bool valid() const { return property1_ok && property2_ok; }
  const Axis& axis(CellId c) const { return axes.at(c); }
};

// Assemble an AxisSet from one axis per cell and evaluate both properties.
inline AxisSet make_axis_set(const Board& b, std::vector<Axis> axes) {
  if (static_cast<int>(axes.size()) != b.cell_count()) throw InvalidArgument("need exactly one axis per cell");
  AxisSet s;
  s.axes = std::move(axes);
  s.property1_ok = std::all_of(s.axes.begin(), s.axes.end(), [&](const Axis& a) { return axis_property1(b, a); });
  s.property2_ok = true;
  for (VertexId v = 0; v < b.vertex_count(); ++v) {
    if (b.degree(v) < 4) continue;
    const bool covered = std::any_of(s.axes.begin(), s.axes.end(), [&](const Axis& a) { return a.fixes(v); });
    s.property2_ok &= covered;
  }
  for (const auto& a : s.axes) s.si_edges.insert(s.si_edges.end(), a.fixed_edges.begin(), a.fixed_edges.end());
  std::sort(s.si_edges.begin(), s.si_edges.end());
  s.si_parity = s.si_edges.size() % 2 == 0 ? Parity::Even : Parity::Odd;
  return s;
}

namespace detail {

inline void require_axis_family(const Board& b) {
  const auto r = validate_structure(b);
  if (!r.is_cactus || !r.is_triangle_free || !r.every_edge_in_exactly_one_cycle)
    throw UnsupportedBoard("axis sets need a triangle-free cactus with every edge in exactly one cycle");
}

// Backtrack over Property-1 axes per cell; `visit` returns false to stop.
inline void for_each_valid_axis_set(const Board& b, const std::function<bool(const std::vector<Axis>&)>& visit) {
  require_axis_family(b);
  const int k = b.cell_count();
  std::vector<std::vector<Axis>> candidates(k);
  for (CellId c = 0; c < k; ++c)
    for (auto& a : enumerate_axes(b, c))
      if (axis_property1(b, a)) candidates[c].push_back(std::move(a));

  // Last cell (in id order) containing each high-degree vertex, for pruning.
  std::vector<std::vector<VertexId>> closes(k);
  for (VertexId v = 0; v < b.vertex_count(); ++v) {
    if (b.degree(v) < 4) continue;
    CellId last = -1;
    for (EdgeId e : b.incident(v)) last = std::max(last, b.edge_cells(e).front());
    closes[last].push_back(v);
  }

  std::vector<Axis> chosen;
  bool stop = false;
  std::function<void(CellId)> rec = [&](CellId c) {
    if (stop) return;
    if (c == k) {
      stop = !visit(chosen);
      return;
    }
    for (const auto& a : candidates[c]) {
      chosen.push_back(a);
      bool ok = true;
      for (VertexId v : closes[c]) {
        const bool covered = std::any_of(chosen.begin(), chosen.end(), [&](const Axis& x) { return x.fixes(v); });
        if (!covered) {
          ok = false;
          break;
        }
      }
      if (ok) rec(c + 1);
      chosen.pop_back();
      if (stop) return;
    }
  };
  rec(0);
}

}  // namespace detail

/// First axis set (deterministic order) satisfying both properties, or nullopt
/// when the backtracking space is exhausted without one.
inline std::optional<AxisSet> select_axis_set(const Board& b) {
  std::optional<AxisSet> found;
  detail::for_each_valid_axis_set(b, [&](const std::vector<Axis>& axes) {
    found = make_axis_set(b, axes);
    return false;
  });
  return found;
}

inline std::vector<AxisSet> all_axis_sets(const Board& b, std::size_t limit = 1'000'000) {
  std::vector<AxisSet> out;
  detail::for_each_valid_axis_set(b, [&](const std::vector<Axis>& axes) {
    out.push_back(make_axis_set(b, axes));
    return out.size() < limit;
  });
  return out;
}

struct ParityInvarianceReport {
  std::size_t axis_sets = 0;
  std::set<std::size_t> si_counts;
  std::set<Parity> parities;
  bool consistent() const { return axis_sets > 0 && parities.size() == 1; }
};

inline ParityInvarianceReport si_parity_invariance_check(const Board& b) {
  ParityInvarianceReport r;
  detail::for_each_valid_axis_set(b, [&](const std::vector<Axis>& axes) {
    std::size_t si = 0;
    for (const auto& a : axes) si += a.fixed_edges.size();
    ++r.axis_sets;
    r.si_counts.insert(si);
    r.parities.insert(si % 2 == 0 ? Parity::Even : Parity::Odd);
    return true;
  });
  return r;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json axis_to_json(const Axis& a) {
  nlohmann::json fixed;
  switch (a.kind()) {
    case AxisKind::VertexEdge:
      fixed = {{"vertex", a.fixed_vertices.front()}, {"edge", a.fixed_edges.front()}};
      break;
    case AxisKind::VertexVertex: fixed = {{"vertices", a.fixed_vertices}}; break;
    case AxisKind::EdgeEdge: fixed = {{"edges", a.fixed_edges}}; break;
  }
  return {{"cycle", a.cycle}, {"fixed", fixed}, {"si_edges", a.fixed_edges}};
}

inline nlohmann::json axis_set_to_json(const AxisSet& s) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : s.axes) axes.push_back(axis_to_json(a));
  return {{"axes", axes},
          {"property1_ok", s.property1_ok},
          {"property2_ok", s.property2_ok},
          {"si_edges", s.si_edges},
          {"si_parity", parity_name(s.si_parity)}};
}

inline nlohmann::json involution_to_json(const Involution& inv) {
  nlohmann::json classes = nlohmann::json::array();
  for (auto c : inv.cell_class) classes.push_back(cell_class_name(c));
  return {{"vertex_map", inv.vertex_map}, {"edge_map", inv.edge_map}, {"cell_map", inv.cell_map},
          {"cell_classes", classes}, {"si_edges", inv.self_involutive_edges()}};
}

namespace detail {

inline EdgeId edge_ref(const Board& b, const nlohmann::json& j, const std::string& path) {
  if (j.is_number_integer()) {
    const int e = j.get<int>();
    if (e < 0 || e >= b.edge_count()) throw BoardError(path, "unknown edge " + std::to_string(e));
    return e;
  }
  if (j.is_array() && j.size() == 2) {
    auto ref = [&](const nlohmann::json& x) -> VertexId {
      if (x.is_number_integer()) return x.get<int>();
      if (x.is_string())
        if (auto v = b.find_label(x.get<std::string>())) return *v;
      throw BoardError(path, "bad vertex reference in edge");
    };
    if (auto e = b.find_edge(ref(j[0]), ref(j[1]))) return *e;
    throw BoardError(path, "no such edge");
  }
  throw BoardError(path, "edge reference must be an id or a [u, v] pair");
}

inline VertexId vertex_ref_any(const Board& b, const nlohmann::json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_string())
    if (auto v = b.find_label(j.get<std::string>())) return *v;
  throw BoardError(path, "bad vertex reference");
}

}  // namespace detail

/// Parse an explicit per-cycle axis choice. Each entry names a cycle and its
/// fixed elements ({"vertex","edge"}, {"vertices"} or {"edges"}); vertices may
/// be ids or labels and edges ids or [u, v] pairs. Cycles left out fall back to
/// nothing: every cell must be listed.
inline AxisSet parse_axis_set(const Board& b, const nlohmann::json& j) {
  const auto& list = j.is_object() && j.contains("axes") ? j["axes"] : j;
  if (!list.is_array()) throw BoardError("axes", "expected an array");
  std::vector<std::optional<Axis>> chosen(b.cell_count());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "axes[" + std::to_string(i) + "]";
    const CellId c = detail::require_int(list[i], "cycle", path);
    if (c < 0 || c >= b.cell_count()) throw BoardError(path + ".cycle", "unknown cell");
    const auto& fixed = detail::require(list[i], "fixed", path);
    std::vector<VertexId> fv;
    std::vector<EdgeId> fe;
    if (fixed.contains("vertex")) fv.push_back(detail::vertex_ref_any(b, fixed["vertex"], path));
    if (fixed.contains("vertices"))
      for (const auto& v : fixed["vertices"]) fv.push_back(detail::vertex_ref_any(b, v, path));
    if (fixed.contains("edge")) fe.push_back(detail::edge_ref(b, fixed["edge"], path));
    if (fixed.contains("edges"))
      for (const auto& e : fixed["edges"]) fe.push_back(detail::edge_ref(b, e, path));
    std::sort(fv.begin(), fv.end());
    std::sort(fe.begin(), fe.end());
    for (auto& a : enumerate_axes(b, c))
      if (a.fixed_vertices == fv && a.fixed_edges == fe) chosen[c] = std::move(a);
    if (!chosen[c]) throw BoardError(path, "no reflection of cell " + std::to_string(c) + " fixes those elements");
  }
  std::vector<Axis> axes;
  for (CellId c = 0; c < b.cell_count(); ++c) {
    if (!chosen[c]) throw BoardError("axes", "missing axis for cell " + std::to_string(c));
    axes.push_back(std::move(*chosen[c]));
  }
  return make_axis_set(b, std::move(axes));
}

}  // namespace goc
