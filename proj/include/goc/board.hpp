#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "goc/error.hpp"

namespace goc {

using VertexId = int;
using EdgeId = int;
using CellId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct VertexRecord {
  VertexId id = 0;
  std::optional<Point> pos;  // render-only
  std::string label;         // optional display name ("A", "a", ...)
  bool operator==(const VertexRecord&) const = default;
};

// Canonical orientation: u < v, and FORWARD means u -> v.
struct EdgeRecord {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  VertexId other(VertexId w) const { return w == u ? v : u; }
  bool operator==(const EdgeRecord&) const = default;
};

// Bounded cell given as a closed counterclockwise walk. edges[i] joins walk[i]
// and walk[(i+1) % n]; aligned[i] is true when that walk step goes u -> v.
struct CellRecord {
  CellId id = 0;
  std::vector<VertexId> walk;
  std::vector<EdgeId> edges;
  std::vector<bool> aligned;
  std::size_t length() const { return walk.size(); }
  bool operator==(const CellRecord& o) const { return id == o.id && walk == o.walk; }
};

/// Immutable game board: a simple connected graph plus its bounded cells.
///
/// Construction validates every structural invariant and throws BoardError with
/// a path to the first offending element. Boards are never mutated afterwards,
/// so a `std::shared_ptr<const Board>` can be shared freely between threads.
class Board {
 public:
  Board(std::vector<VertexRecord> vertices, std::vector<EdgeRecord> edges,
        std::vector<std::vector<VertexId>> cell_walks)
      : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    const int nv = static_cast<int>(vertices_.size());
    if (nv == 0) throw BoardError("vertices", "board has no vertices");
    for (int i = 0; i < nv; ++i) {
      if (vertices_[i].id != i)
        throw BoardError("vertices[" + std::to_string(i) + "].id", "vertex ids must be dense and in order");
    }
    incident_.assign(nv, {});
    std::set<std::pair<VertexId, VertexId>> seen;
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
      const auto& e = edges_[i];
      const std::string path = "edges[" + std::to_string(i) + "]";
      if (e.id != i) throw BoardError(path + ".id", "edge ids must be dense and in order");
      if (e.u < 0 || e.u >= nv) throw BoardError(path + ".u", "unknown vertex " + std::to_string(e.u));
      if (e.v < 0 || e.v >= nv) throw BoardError(path + ".v", "unknown vertex " + std::to_string(e.v));
      if (e.u == e.v) throw BoardError(path, "loop edges are not allowed");
      if (e.u > e.v) throw BoardError(path, "endpoints must satisfy u < v");
      if (!seen.emplace(e.u, e.v).second)
        throw BoardError(path, "duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
      incident_[e.u].push_back(i);
      incident_[e.v].push_back(i);
      edge_index_.emplace(std::pair{e.u, e.v}, i);
    }
    check_connected();

    edge_cells_.assign(edges_.size(), {});
    for (int c = 0; c < static_cast<int>(cell_walks.size()); ++c) {
      const std::string path = "cells[" + std::to_string(c) + "].walk";
      auto& walk = cell_walks[c];
      if (walk.size() < 3) throw BoardError(path, "cell walk must have length >= 3");
      CellRecord cell;
      cell.id = c;
      cell.walk = walk;
      std::set<EdgeId> used;
      for (std::size_t i = 0; i < walk.size(); ++i) {
        const VertexId a = walk[i];
        const VertexId b = walk[(i + 1) % walk.size()];
        if (a < 0 || a >= nv || b < 0 || b >= nv)
          throw BoardError(path + "[" + std::to_string(i) + "]", "unknown vertex");
        const auto e = find_edge(a, b);
        if (!e)
          throw BoardError(path + "[" + std::to_string(i) + "]",
                           "open cell walk: no edge between " + std::to_string(a) + " and " + std::to_string(b));
        if (!used.insert(*e).second)
          throw BoardError(path + "[" + std::to_string(i) + "]", "edge repeated inside one cell walk");
        cell.edges.push_back(*e);
        cell.aligned.push_back(edges_[*e].u == a);
        edge_cells_[*e].push_back(c);
        if (edge_cells_[*e].size() > 2)
          throw BoardError(path, "edge " + std::to_string(*e) + " belongs to more than two cells");
      }
      cells_.push_back(std::move(cell));
    }
  }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int cell_count() const { return static_cast<int>(cells_.size()); }

  const std::vector<VertexRecord>& vertices() const { return vertices_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  const std::vector<CellRecord>& cells() const { return cells_; }
  const VertexRecord& vertex(VertexId v) const { return vertices_.at(v); }
  const EdgeRecord& edge(EdgeId e) const { return edges_.at(e); }
  const CellRecord& cell(CellId c) const { return cells_.at(c); }

  const std::vector<EdgeId>& incident(VertexId v) const { return incident_.at(v); }
  int degree(VertexId v) const { return static_cast<int>(incident_.at(v).size()); }
  const std::vector<CellId>& edge_cells(EdgeId e) const { return edge_cells_.at(e); }

  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const {
    auto it = edge_index_.find(std::minmax(a, b));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  // Vertex id for a label, or nullopt.
  std::optional<VertexId> find_label(const std::string& label) const {
    for (const auto& v : vertices_)
      if (v.label == label) return v.id;
    return std::nullopt;
  }

  std::string vertex_name(VertexId v) const {
    const auto& rec = vertices_.at(v);
    return rec.label.empty() ? std::to_string(v) : rec.label;
  }

  bool operator==(const Board& o) const {
    return vertices_ == o.vertices_ && edges_ == o.edges_ && cells_ == o.cells_;
  }

 private:
  void check_connected() const {
    std::vector<bool> seen(vertices_.size(), false);
    std::vector<VertexId> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (EdgeId e : incident_[v]) {
        const VertexId w = edges_[e].other(v);
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (std::size_t v = 0; v < seen.size(); ++v)
      if (!seen[v]) throw BoardError("vertices[" + std::to_string(v) + "]", "graph is disconnected");
  }

  std::vector<VertexRecord> vertices_;
  std::vector<EdgeRecord> edges_;
  std::vector<CellRecord> cells_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<std::vector<CellId>> edge_cells_;
  std::map<std::pair<VertexId, VertexId>, EdgeId> edge_index_;
};

using BoardPtr = std::shared_ptr<const Board>;

// ---------------------------------------------------------------------------
// Generators

inline Board make_cycle_board(int n) {
  if (n < 3) throw InvalidArgument("cycle board needs n >= 3, got " + std::to_string(n));
  std::vector<VertexRecord> vs;
  std::vector<EdgeRecord> es;
  std::vector<VertexId> walk;
  const double r = 0.5 / std::sin(std::numbers::pi / n);
  for (int i = 0; i < n; ++i) {
    const double t = std::numbers::pi / 2 + 2 * std::numbers::pi * i / n;
    vs.push_back({i, Point{r * std::cos(t), r * std::sin(t)}, {}});
    walk.push_back(i);
  }
  for (int i = 0; i < n; ++i) {
    const int a = i, b = (i + 1) % n;
    es.push_back({i, std::min(a, b), std::max(a, b)});
  }
  return Board(std::move(vs), std::move(es), {walk});
}

struct CactusJoin {
  int cycle_a = 0;
  int position_a = 0;
  int cycle_b = 0;
  int position_b = 0;
  bool operator==(const CactusJoin&) const = default;
};

// Cycles glued along a join tree. Join (a, pa, b, pb) glues position pb of
// cycle b onto position pa of cycle a.
struct CactusSpec {
  std::vector<int> cycles;
  std::vector<CactusJoin> joins;
  bool operator==(const CactusSpec&) const = default;
};

namespace detail {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

inline void check_cactus_spec(const CactusSpec& spec) {
  const int k = static_cast<int>(spec.cycles.size());
  if (k == 0) throw InvalidSpec("cactus spec has no cycles");
  for (int i = 0; i < k; ++i)
    if (spec.cycles[i] < 3)
      throw InvalidSpec("cycles[" + std::to_string(i) + "]: length must be >= 3");
  DisjointSets trees(k);
  for (std::size_t j = 0; j < spec.joins.size(); ++j) {
    const auto& jn = spec.joins[j];
    const std::string path = "joins[" + std::to_string(j) + "]";
    if (jn.cycle_a < 0 || jn.cycle_a >= k || jn.cycle_b < 0 || jn.cycle_b >= k)
      throw InvalidSpec(path + ": cycle index out of range");
    if (jn.position_a < 0 || jn.position_a >= spec.cycles[jn.cycle_a])
      throw InvalidSpec(path + ": position_a out of range");
    if (jn.position_b < 0 || jn.position_b >= spec.cycles[jn.cycle_b])
      throw InvalidSpec(path + ": position_b out of range");
    if (!trees.unite(jn.cycle_a, jn.cycle_b)) throw InvalidSpec(path + ": join relation is cyclic");
  }
  if (static_cast<int>(spec.joins.size()) != k - 1) throw InvalidSpec("join relation is disconnected");
}

}  // namespace detail

/// Glue the spec's cycles into one board; each cycle becomes one cell.
///
/// Vertex ids are handed out in order of first appearance while scanning the
/// cycles in spec order and positions from 0; a glued vertex keeps the id of
/// its first appearance. Edge ids follow the same scan (cycle i, edge from
/// position j to j+1). The layout places child cycles outward from their
/// join vertex; it is cosmetic only.
inline Board build_cactus(const CactusSpec& spec) {
  detail::check_cactus_spec(spec);
  const int k = static_cast<int>(spec.cycles.size());
  std::vector<int> offset(k + 1, 0);
  for (int i = 0; i < k; ++i) offset[i + 1] = offset[i] + spec.cycles[i];
  detail::DisjointSets slots(offset[k]);
  for (const auto& jn : spec.joins)
    slots.unite(offset[jn.cycle_a] + jn.position_a, offset[jn.cycle_b] + jn.position_b);

  std::map<int, VertexId> root_to_vertex;
  std::vector<VertexId> slot_vertex(offset[k]);
  for (int s = 0; s < offset[k]; ++s) {
    auto [it, fresh] = root_to_vertex.emplace(slots.find(s), static_cast<VertexId>(root_to_vertex.size()));
    slot_vertex[s] = it->second;
  }
  const int nv = static_cast<int>(root_to_vertex.size());

  std::vector<std::vector<VertexId>> walks(k);
  std::vector<EdgeRecord> es;
  for (int i = 0; i < k; ++i) {
    const int m = spec.cycles[i];
    for (int j = 0; j < m; ++j) walks[i].push_back(slot_vertex[offset[i] + j]);
    for (int j = 0; j < m; ++j) {
      const VertexId a = walks[i][j], b = walks[i][(j + 1) % m];
      es.push_back({static_cast<EdgeId>(es.size()), std::min(a, b), std::max(a, b)});
    }
  }

  // Layout: breadth-first over the join tree from cycle 0.
  std::vector<std::optional<Point>> pos(nv);
  std::vector<bool> placed(k, false);
  auto radius = [](int m) { return 0.5 / std::sin(std::numbers::pi / m); };
  auto place = [&](int c, Point centre, double start_angle, int anchor_position) {
    const int m = spec.cycles[c];
    for (int j = 0; j < m; ++j) {
      const int step = (j - anchor_position + m) % m;
      const double t = start_angle + 2 * std::numbers::pi * step / m;
      const VertexId v = walks[c][j];
      if (!pos[v]) pos[v] = Point{centre.x + radius(m) * std::cos(t), centre.y + radius(m) * std::sin(t)};
    }
    placed[c] = true;
  };
  std::vector<Point> centre(k);
  place(0, Point{}, std::numbers::pi / 2, 0);
  std::vector<int> queue{0};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int c = queue[qi];
    for (const auto& jn : spec.joins) {
      int child = -1, child_pos = 0, parent_pos = 0;
      if (jn.cycle_a == c && !placed[jn.cycle_b]) {
        child = jn.cycle_b, child_pos = jn.position_b, parent_pos = jn.position_a;
      } else if (jn.cycle_b == c && !placed[jn.cycle_a]) {
        child = jn.cycle_a, child_pos = jn.position_a, parent_pos = jn.position_b;
      }
      if (child < 0) continue;
      const Point join = *pos[walks[c][parent_pos]];
      double dx = join.x - centre[c].x, dy = join.y - centre[c].y;
      const double len = std::hypot(dx, dy);
      dx /= len, dy /= len;
      const double r = radius(spec.cycles[child]);
      centre[child] = Point{join.x + dx * r, join.y + dy * r};
      place(child, centre[child], std::atan2(-dy, -dx), child_pos);
      queue.push_back(child);
    }
  }

  std::vector<VertexRecord> vs;
  for (int v = 0; v < nv; ++v) vs.push_back({v, pos[v], {}});
  return Board(std::move(vs), std::move(es), std::move(walks));
}

// ---------------------------------------------------------------------------
// Structure classification

struct StructureReport {
  bool is_cactus = false;
  bool is_triangle_free = false;
  bool every_edge_in_exactly_one_cycle = false;
  int min_degree = 0;
  std::vector<VertexId> high_degree_vertices;  // degree >= 4
};

namespace detail {

// Biconnected components as edge sets (iterative Hopcroft-Tarjan).
inline std::vector<std::vector<EdgeId>> biconnected_blocks(const Board& b) {
  const int n = b.vertex_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<std::vector<EdgeId>> blocks;
  std::vector<EdgeId> edge_stack;
  int timer = 0;
  struct Frame {
    VertexId v;
    EdgeId via;
    std::size_t next;
  };
  for (VertexId root = 0; root < n; ++root) {
    if (disc[root] >= 0) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& inc = b.incident(f.v);
      if (f.next < inc.size()) {
        const EdgeId e = inc[f.next++];
        if (e == f.via) continue;
        const VertexId w = b.edge(e).other(f.v);
        if (disc[w] < 0) {
          edge_stack.push_back(e);
          disc[w] = low[w] = timer++;
          stack.push_back({w, e, 0});
        } else if (disc[w] < disc[f.v]) {
          edge_stack.push_back(e);
          low[f.v] = std::min(low[f.v], disc[w]);
        }
        continue;
      }
      const Frame done = f;
      stack.pop_back();
      if (stack.empty()) break;
      Frame& parent = stack.back();
      low[parent.v] = std::min(low[parent.v], low[done.v]);
      if (low[done.v] >= disc[parent.v]) {
        std::vector<EdgeId> block;
        while (!edge_stack.empty()) {
          const EdgeId e = edge_stack.back();
          edge_stack.pop_back();
          block.push_back(e);
          if (e == done.via) break;
        }
        blocks.push_back(std::move(block));
      }
    }
  }
  return blocks;
}

}  // namespace detail

inline StructureReport validate_structure(const Board& b) {
  StructureReport r;
  r.min_degree = b.degree(0);
  for (VertexId v = 0; v < b.vertex_count(); ++v) {
    r.min_degree = std::min(r.min_degree, b.degree(v));
    if (b.degree(v) >= 4) r.high_degree_vertices.push_back(v);
  }
  r.is_triangle_free = std::none_of(b.cells().begin(), b.cells().end(),
                                    [](const CellRecord& c) { return c.length() == 3; });
  r.every_edge_in_exactly_one_cycle = true;
  for (EdgeId e = 0; e < b.edge_count(); ++e)
    if (b.edge_cells(e).size() != 1) r.every_edge_in_exactly_one_cycle = false;

  // Cactus: every block is a bridge or a simple cycle, each cycle block is
  // exactly one cell, and no two cells share more than one vertex.
  bool cactus = true;
  std::set<std::set<EdgeId>> cell_edge_sets;
  for (const auto& c : b.cells()) cell_edge_sets.insert(std::set<EdgeId>(c.edges.begin(), c.edges.end()));
  for (const auto& block : detail::biconnected_blocks(b)) {
    if (block.size() == 1) continue;
    std::set<VertexId> verts;
    for (EdgeId e : block) verts.insert(b.edge(e).u), verts.insert(b.edge(e).v);
    if (verts.size() != block.size() || !cell_edge_sets.contains(std::set<EdgeId>(block.begin(), block.end()))) {
      cactus = false;
      break;
    }
  }
  for (int i = 0; cactus && i < b.cell_count(); ++i) {
    const std::set<VertexId> vi(b.cell(i).walk.begin(), b.cell(i).walk.end());
    for (int j = i + 1; j < b.cell_count(); ++j) {
      int shared = 0;
      for (VertexId v : b.cell(j).walk) shared += vi.contains(v);
      if (shared > 1) {
        cactus = false;
        break;
      }
    }
  }
  r.is_cactus = cactus;
  return r;
}

// ---------------------------------------------------------------------------
// JSON interchange

inline nlohmann::json serialize_board(const Board& b) {
  using nlohmann::json;
  json vs = json::array(), es = json::array(), cs = json::array();
  for (const auto& v : b.vertices()) {
    json j{{"id", v.id}};
    if (v.pos) j["x"] = v.pos->x, j["y"] = v.pos->y;
    if (!v.label.empty()) j["label"] = v.label;
    vs.push_back(std::move(j));
  }
  for (const auto& e : b.edges()) es.push_back({{"id", e.id}, {"u", e.u}, {"v", e.v}});
  for (const auto& c : b.cells()) cs.push_back({{"id", c.id}, {"walk", c.walk}});
  return {{"vertices", vs}, {"edges", es}, {"cells", cs}};
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw BoardError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw BoardError(path + "." + key, "missing field");
  return *it;
}

inline int require_int(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) throw BoardError(path + "." + key, "expected an integer");
  return v.get<int>();
}

inline const nlohmann::json& require_array(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_array()) throw BoardError(path + "." + key, "expected an array");
  return v;
}

}  // namespace detail

inline Board parse_board(const nlohmann::json& doc) {
  using detail::require_array;
  using detail::require_int;
  std::vector<VertexRecord> vs;
  std::vector<EdgeRecord> es;
  std::vector<std::vector<VertexId>> walks;
  const auto& jv = require_array(doc, "vertices", "");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const std::string path = "vertices[" + std::to_string(i) + "]";
    VertexRecord rec;
    rec.id = require_int(jv[i], "id", path);
    const bool has_x = jv[i].contains("x"), has_y = jv[i].contains("y");
    if (has_x != has_y) throw BoardError(path, "coords need both x and y");
    if (has_x) {
      if (!jv[i]["x"].is_number() || !jv[i]["y"].is_number()) throw BoardError(path, "coords must be numbers");
      rec.pos = Point{jv[i]["x"].get<double>(), jv[i]["y"].get<double>()};
    }
    if (jv[i].contains("label")) {
      if (!jv[i]["label"].is_string()) throw BoardError(path + ".label", "expected a string");
      rec.label = jv[i]["label"].get<std::string>();
    }
    vs.push_back(std::move(rec));
  }
  const auto& je = require_array(doc, "edges", "");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    es.push_back({require_int(je[i], "id", path), require_int(je[i], "u", path), require_int(je[i], "v", path)});
  }
  const auto& jc = require_array(doc, "cells", "");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string path = "cells[" + std::to_string(i) + "]";
    if (require_int(jc[i], "id", path) != static_cast<int>(i))
      throw BoardError(path + ".id", "cell ids must be dense and in order");
    const auto& w = require_array(jc[i], "walk", path);
    std::vector<VertexId> walk;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (!w[k].is_number_integer())
        throw BoardError(path + ".walk[" + std::to_string(k) + "]", "expected an integer");
      walk.push_back(w[k].get<int>());
    }
    walks.push_back(std::move(walk));
  }
  return Board(std::move(vs), std::move(es), std::move(walks));
}

inline CactusSpec parse_cactus_spec(const nlohmann::json& doc) {
  CactusSpec spec;
  try {
    for (const auto& c : doc.at("cycles")) spec.cycles.push_back(c.get<int>());
    if (doc.contains("joins")) {
      for (const auto& j : doc.at("joins")) {
        if (!j.is_array() || j.size() != 4) throw InvalidSpec("each join must be [cycle_a, pos_a, cycle_b, pos_b]");
        spec.joins.push_back({j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()});
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidSpec(std::string("malformed cactus spec: ") + ex.what());
  }
  return spec;
}

inline nlohmann::json serialize_cactus_spec(const CactusSpec& spec) {
  nlohmann::json joins = nlohmann::json::array();
  for (const auto& j : spec.joins) joins.push_back({j.cycle_a, j.position_a, j.cycle_b, j.position_b});
  return {{"cycles", spec.cycles}, {"joins", joins}};
}

}  // namespace goc
