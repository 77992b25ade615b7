#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "goc/board.hpp"
#include "goc/rules.hpp"
#include "goc/solver.hpp"
#include "goc/symmetry.hpp"

namespace goc {

enum class StrategyKind { Perfect, Mirror, ModifiedMirror, Triangle };

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Perfect: return "perfect";
    case StrategyKind::Mirror: return "mirror";
    case StrategyKind::ModifiedMirror: return "mmr";
    case StrategyKind::Triangle: return "triangle";
  }
  return "?";
}

inline StrategyKind parse_strategy_kind(const std::string& s) {
  if (s == "perfect") return StrategyKind::Perfect;
  if (s == "mirror") return StrategyKind::Mirror;
  if (s == "mmr") return StrategyKind::ModifiedMirror;
  if (s == "triangle") return StrategyKind::Triangle;
  throw InvalidArgument("unknown strategy '" + s + "' (expected perfect, mirror, mmr or triangle)");
}

class StrategyInapplicable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The strategy dictated a move it cannot make. `rule` names the clause that
// produced the move; `violation` is set when the move breaks the sink-source
// rule or hits a marked edge.
class StrategyFailure : public std::runtime_error {
 public:
  StrategyFailure(const Board& b, std::string rule, std::optional<Move> dictated, std::optional<Violation> violation,
                  std::string reason)
      : std::runtime_error(format(b, rule, dictated, violation, reason)),
        rule_(std::move(rule)),
        dictated_(dictated),
        violation_(violation),
        reason_(std::move(reason)) {}

  const std::string& rule() const { return rule_; }
  std::optional<Move> dictated() const { return dictated_; }
  std::optional<Violation> violation() const { return violation_; }
  const std::string& reason() const { return reason_; }

 private:
  static std::string format(const Board& b, const std::string& rule, std::optional<Move> m, std::optional<Violation> v,
                            const std::string& reason) {
    std::string s = "strategy failure (" + rule + ")";
    if (m) s += ": dictated move " + describe(b, *m);
    if (v) s += " " + describe(b, *v);
    if (!reason.empty()) s += (m || v ? "; " : ": ") + reason;
    return s;
  }

  std::string rule_;
  std::optional<Move> dictated_;
  std::optional<Violation> violation_;
  std::string reason_;
};

enum class TriangleCase { Undecided, Case1, Case2, Case3 };

inline const char* triangle_case_name(TriangleCase c) {
  switch (c) {
    case TriangleCase::Undecided: return "UNDECIDED";
    case TriangleCase::Case1: return "CASE_1";
    case TriangleCase::Case2: return "CASE_2";
    case TriangleCase::Case3: return "CASE_3";
  }
  return "?";
}

struct StrategyOptions {
  // Explicit axes for mmr; skips select_axis_set (and its validity check).
  std::optional<AxisSet> axes;
  // Shuffle the SI pairing instead of pairing sorted edges consecutively.
  std::optional<std::uint64_t> pairing_seed;
  // mmr with odd parity: the SI edge to open on (default: lowest id).
  std::optional<EdgeId> opening_edge;
  std::uint64_t budget = kDefaultBudget;
};

// C3 and Cn sharing exactly one vertex.
struct TriangleShape {
  VertexId a = -1;
  CellId triangle = -1;
  CellId big = -1;
  int n = 0;
};

inline std::optional<TriangleShape> triangle_shape(const Board& b) {
  if (b.cell_count() != 2) return std::nullopt;
  const auto r = validate_structure(b);
  if (!r.is_cactus || !r.every_edge_in_exactly_one_cycle) return std::nullopt;
  TriangleShape t;
  for (const auto& c : b.cells()) (c.length() == 3 ? t.triangle : t.big) = c.id;
  if (t.triangle < 0 || t.big < 0 || b.cell(t.big).length() < 4) return std::nullopt;
  for (VertexId v : b.cell(t.triangle).walk)
    for (VertexId w : b.cell(t.big).walk)
      if (v == w) t.a = v;
  if (t.a < 0) return std::nullopt;
  t.n = static_cast<int>(b.cell(t.big).length());
  return t;
}

/// A running strategy for one player. Decisions are derived from the game
/// history alone, so a session can be rebuilt and replayed at any point.
class StrategySession {
 public:
  static StrategySession create(BoardPtr board, StrategyKind kind, Player role, StrategyOptions opts = {}) {
    StrategySession s(std::move(board), kind, role, std::move(opts));
    switch (kind) {
      case StrategyKind::Perfect: s.solver_ = std::make_shared<Solver>(s.board_, SolveOptions{.budget = s.opts_.budget}); break;
      case StrategyKind::Mirror: s.init_mirror(); break;
      case StrategyKind::ModifiedMirror: s.init_mmr(); break;
      case StrategyKind::Triangle: s.init_triangle(); break;
    }
    return s;
  }

  StrategyKind kind() const { return kind_; }
  Player role() const { return role_; }
  const Board& board() const { return *board_; }
  const std::optional<AxisSet>& axes() const { return axes_; }
  const std::optional<Involution>& involution() const { return involution_; }
  std::optional<EdgeId> opening_edge() const { return opening_; }
  const std::vector<std::pair<EdgeId, EdgeId>>& si_pairing() const { return pairing_; }
  bool is_si_edge(EdgeId e) const { return si_cycle_[e] >= 0; }
  const std::optional<TriangleShape>& shape() const { return shape_; }

  // The reflected, reversed answer to `m` under the session's partner map.
  Move mirror_reverse(Move m) const { return mirror_[m.edge][m.direction == Direction::Forward ? 0 : 1]; }

  std::optional<EdgeId> si_partner(EdgeId e) const {
    for (auto [x, y] : pairing_) {
      if (x == e) return y;
      if (y == e) return x;
    }
    return std::nullopt;
  }

  Move next_move(const GameState& state) {
    if (&state.board() != board_.get() && !(state.board() == *board_))
      throw std::logic_error("state belongs to a different board");
    if (state.outcome().finished()) throw std::logic_error("next_move on a finished game");
    if (state.to_move() != role_) throw std::logic_error("next_move called on the opponent's turn");
    switch (kind_) {
      case StrategyKind::Perfect: return perfect_move(state);
      case StrategyKind::Mirror: return mirror_move(state);
      case StrategyKind::ModifiedMirror: return mmr_move(state);
      case StrategyKind::Triangle: return triangle_move(state);
    }
    throw std::logic_error("unreachable");
  }

  TriangleCase triangle_case(const GameState& state) const {
    if (!shape_ || shape_->n % 2 == 0 || state.history().size() < 2) return TriangleCase::Undecided;
    const Move reply = state.history()[1];
    if (board_->edge_cells(reply.edge).front() == shape_->triangle) return TriangleCase::Case1;
    const auto& e = board_->edge(reply.edge);
    if (dist_a_[e.u] <= 1 || dist_a_[e.v] <= 1) return TriangleCase::Case2;
    return TriangleCase::Case3;
  }

  // Whatever next_move depends on beyond the marks and the opponent's last move.
  int history_key(const GameState& state) const {
    return kind_ == StrategyKind::Triangle ? static_cast<int>(triangle_case(state)) : 0;
  }

 private:
  StrategySession(BoardPtr b, StrategyKind k, Player r, StrategyOptions o)
      : board_(std::move(b)), kind_(k), role_(r), opts_(std::move(o)), si_cycle_(board_->edge_count(), -1) {}

  // --- setup ---------------------------------------------------------------

  void set_mirror_from_axes(const AxisSet& set) {
    mirror_.assign(board_->edge_count(), {});
    for (const auto& ax : set.axes)
      for (EdgeId e : board_->cell(ax.cycle).edges) {
        const auto& r = board_->edge(e);
        // u->v mirrors to v'->u'
        mirror_[e][0] = *move_between(*board_, ax.partner(r.v), ax.partner(r.u));
        mirror_[e][1] = *move_between(*board_, ax.partner(r.u), ax.partner(r.v));
      }
    for (const auto& ax : set.axes)
      for (EdgeId e : ax.fixed_edges) si_cycle_[e] = ax.cycle;
  }

  void init_mirror() {
    if (board_->vertex_count() > kInvolutionVertexGuard)
      throw StrategyInapplicable("mirror needs a global involution; board exceeds the " +
                                 std::to_string(kInvolutionVertexGuard) + "-vertex search guard");
    std::string seen;
    for (auto& inv : find_involutions(*board_)) {
      if (!inv.cells_self_or_nowhere()) continue;
      const auto si = inv.self_involutive_edges();
      std::optional<Player> winner;
      if (si.empty()) winner = Player::Two;
      else if (si.size() == 1 && inv.edge_flipped(*board_, si.front())) winner = Player::One;
      if (!winner) continue;
      if (*winner != role_) {
        seen = "the available involution wins for player " + std::to_string(to_int(*winner));
        continue;
      }
      mirror_.assign(board_->edge_count(), {});
      for (const auto& r : board_->edges()) {
        mirror_[r.id][0] = *move_between(*board_, inv.vertex_map[r.v], inv.vertex_map[r.u]);
        mirror_[r.id][1] = *move_between(*board_, inv.vertex_map[r.u], inv.vertex_map[r.v]);
      }
      if (!si.empty()) opening_ = si.front();
      involution_ = std::move(inv);
      return;
    }
    throw StrategyInapplicable(seen.empty() ? "no involution with every cell self- or nowhere-involutive and at most "
                                              "one self-involutive edge"
                                            : seen);
  }

  void init_mmr() {
    if (opts_.axes) {
      axes_ = opts_.axes;
    } else {
      try {
        axes_ = select_axis_set(*board_);
      } catch (const UnsupportedBoard& e) {
        throw StrategyInapplicable(e.what());
      }
      if (!axes_) throw StrategyInapplicable("no axis set satisfies both symmetry properties");
    }
    const Player winner = axes_->si_parity == Parity::Odd ? Player::One : Player::Two;
    if (winner != role_)
      throw StrategyInapplicable(std::string(parity_name(axes_->si_parity)) + " self-involutive parity: the strategy plays for player " +
                                 std::to_string(to_int(winner)));
    set_mirror_from_axes(*axes_);
    std::vector<EdgeId> si = axes_->si_edges;
    if (axes_->si_parity == Parity::Odd) {
      opening_ = opts_.opening_edge.value_or(si.front());
      auto it = std::find(si.begin(), si.end(), *opening_);
      if (it == si.end()) throw StrategyInapplicable("opening edge " + std::to_string(*opening_) + " is not self-involutive");
      si.erase(it);
    }
    if (opts_.pairing_seed) {
      std::mt19937_64 rng(*opts_.pairing_seed);
      std::shuffle(si.begin(), si.end(), rng);
    }
    for (std::size_t i = 0; i + 1 < si.size(); i += 2) pairing_.emplace_back(si[i], si[i + 1]);
  }

  void init_triangle() {
    shape_ = triangle_shape(*board_);
    if (!shape_) throw StrategyInapplicable("triangle needs a C3 and a Cn (n >= 4) joined at one vertex");
    if (role_ != Player::One) throw StrategyInapplicable("triangle plays for player 1");
    const auto& b = *board_;
    // Both cycles reflected through a.
    std::vector<Axis> axes;
    for (CellId c = 0; c < b.cell_count(); ++c)
      for (auto& ax : enumerate_axes(b, c))
        if (ax.fixes(shape_->a)) {
          axes.push_back(std::move(ax));
          break;
        }
    axes_ = make_axis_set(b, std::move(axes));
    set_mirror_from_axes(*axes_);
    if (shape_->n % 2 == 0) opening_ = axes_->axis(shape_->triangle).fixed_edges.front();

    dist_a_.assign(b.vertex_count(), -1);
    std::queue<VertexId> q;
    dist_a_[shape_->a] = 0;
    q.push(shape_->a);
    while (!q.empty()) {
      const VertexId v = q.front();
      q.pop();
      for (EdgeId e : b.incident(v)) {
        const VertexId w = b.edge(e).other(v);
        if (dist_a_[w] < 0) {
          dist_a_[w] = dist_a_[v] + 1;
          q.push(w);
        }
      }
    }
    for (EdgeId e : b.incident(shape_->a)) (b.edge_cells(e).front() == shape_->triangle ? c3_at_a_ : cn_at_a_).push_back(e);
  }

  // --- helpers -------------------------------------------------------------

  const Board& b() const { return *board_; }

  std::optional<Move> completion(const GameState& s) const { return kernel::winning_completion(b(), s.marks()); }

  bool safe(const GameState& s, Move m) const { return s.is_legal(m) && (s.completes_cycle(m) || !s.is_death_move(m)); }

  [[noreturn]] void fail(const GameState& s, const std::string& rule, Move m, const std::string& reason = "") const {
    std::optional<Violation> v;
    if (s.mark(m.edge) != Mark::Unmarked) v = Violation{Violation::Kind::AlreadyMarked, -1};
    else v = kernel::violation(b(), s.marks(), m);
    throw StrategyFailure(b(), rule, m, v, reason.empty() && !v ? "death move" : reason);
  }

  // Prefer legal and not a death move, FORWARD first; then any legal direction.
  std::optional<Move> playable_direction(const GameState& s, EdgeId e) const {
    if (s.mark(e) != Mark::Unmarked) return std::nullopt;
    for (Direction d : {Direction::Forward, Direction::Backward})
      if (safe(s, {e, d})) return Move{e, d};
    for (Direction d : {Direction::Forward, Direction::Backward})
      if (s.is_legal({e, d})) return Move{e, d};
    return std::nullopt;
  }

  Move open_on(const GameState& s, EdgeId e, const std::string& rule) const {
    if (auto m = playable_direction(s, e)) return *m;
    fail(s, rule, {e, Direction::Forward}, "opening edge has no legal direction");
  }

  // --- strategies ----------------------------------------------------------

  Move perfect_move(const GameState& s) {
    auto r = solver_->solve(s);
    if (r.best_move) return *r.best_move;
    // Out of budget: fall back to a safe move so the session keeps playing.
    for (Move m : s.legal_moves())
      if (safe(s, m)) return m;
    return s.legal_moves().front();
  }

  Move mirror_move(const GameState& s) {
    if (auto w = completion(s)) return *w;
    if (s.history().empty()) {
      if (!opening_) throw std::logic_error("mirror without an opening edge cannot move first");
      return open_on(s, *opening_, "opening");
    }
    const Move dictated = mirror_reverse(*s.last_move());
    if (!s.is_legal(dictated) || s.is_death_move(dictated)) fail(s, "mirror-reverse", dictated);
    return dictated;
  }

  Move mmr_move(const GameState& s) {
    if (auto w = completion(s)) return *w;
    if (s.history().empty()) {
      if (!opening_) throw std::logic_error("mmr with even parity cannot move first");
      return open_on(s, *opening_, "opening");
    }
    const Move last = *s.last_move();
    const CellId cycle = b().edge_cells(last.edge).front();
    if (is_si_edge(last.edge)) {
      const auto p = si_partner(last.edge);
      if (p && s.mark(*p) != Mark::Unmarked) return leftover_reply(s, cycle, last.edge);
      return si_reply(s, last.edge, "si-pair");
    }
    const Move dictated = mirror_reverse(last);
    if (s.mark(dictated.edge) != Mark::Unmarked) return leftover_reply(s, cycle, last.edge);
    if (!s.is_legal(dictated)) fail(s, "mirror-reverse", dictated);
    if (!s.is_death_move(dictated)) return dictated;
    // The cycle of the death move holds exactly one unmarked SI edge; answer with its pair.
    const CellId c = b().edge_cells(dictated.edge).front();
    std::vector<EdgeId> open_si;
    for (EdgeId e : axes_->axis(c).fixed_edges)
      if (s.mark(e) == Mark::Unmarked) open_si.push_back(e);
    if (open_si.size() != 1)
      throw StrategyFailure(b(), "death-branch", dictated, std::nullopt,
                            "mirror-reverse is a death move and cycle " + std::to_string(c) + " has " +
                                std::to_string(open_si.size()) + " unmarked self-involutive edges");
    return si_reply(s, open_si.front(), "death-branch");
  }

  // A death-branch reply leaves two edges of its cycle open: the skipped mirror
  // partner and the cycle's SI edge (whose pair was spent). Those two answer
  // each other; `played` is the one the opponent just took.
  Move leftover_reply(const GameState& s, CellId c, EdgeId played) const {
    std::vector<EdgeId> open;
    for (EdgeId e : b().cell(c).edges) {
      if (e == played || s.mark(e) != Mark::Unmarked) continue;
      const bool spent = is_si_edge(e) ? si_partner(e) && s.mark(*si_partner(e)) != Mark::Unmarked
                                       : s.mark(mirror_reverse({e, Direction::Forward}).edge) != Mark::Unmarked;
      if (spent) open.push_back(e);
    }
    if (open.size() != 1)
      throw StrategyFailure(b(), "leftover", std::nullopt, std::nullopt,
                            "answer to edge " + std::to_string(played) + " is already marked and cycle " +
                                std::to_string(c) + " has " + std::to_string(open.size()) + " leftover edges");
    if (auto m = playable_direction(s, open.front())) return *m;
    fail(s, "leftover", {open.front(), Direction::Forward}, "leftover edge is not playable");
  }

  Move si_reply(const GameState& s, EdgeId si, const std::string& rule) const {
    const auto partner = si_partner(si);
    if (!partner) throw StrategyFailure(b(), rule, std::nullopt, std::nullopt, "edge " + std::to_string(si) + " has no SI partner");
    if (auto m = playable_direction(s, *partner)) return *m;
    fail(s, rule, {*partner, Direction::Forward}, "paired self-involutive edge is not playable");
  }

  // Mark an unmarked edge at a toward a, lowest edge id first.
  std::optional<Move> toward_a(const GameState& s, const std::vector<EdgeId>& edges, bool require_safe) const {
    for (EdgeId e : edges) {
      if (s.mark(e) != Mark::Unmarked) continue;
      const Move m = *move_between(b(), b().edge(e).other(shape_->a), shape_->a);
      if (require_safe ? safe(s, m) : s.is_legal(m)) return m;
    }
    return std::nullopt;
  }

  bool into_a(const GameState& s, EdgeId e) const {
    return s.mark(e) != Mark::Unmarked && kernel::points_into(b(), e, s.mark(e), shape_->a);
  }

  bool almost_sink_at_a(const GameState& s) const { return s.vertex_status(shape_->a).is_almost_sink; }

  std::optional<Move> make_almost_sink(const GameState& s) const {
    if (almost_sink_at_a(s)) return std::nullopt;
    if (!std::all_of(c3_at_a_.begin(), c3_at_a_.end(), [&](EdgeId e) { return into_a(s, e); })) return std::nullopt;
    return toward_a(s, cn_at_a_, true);
  }

  Move triangle_generic(const GameState& s) const {
    const Move last = *s.last_move();
    if (b().edge_cells(last.edge).front() == shape_->big) {
      const Move m = mirror_reverse(last);
      if (safe(s, m)) return m;
    }
    const auto moves = s.legal_moves();
    for (Move m : moves)
      if (safe(s, m)) return m;
    return moves.front();
  }

  Move triangle_move(const GameState& s) {
    if (shape_->n % 2 == 0) return mirror_move(s);
    if (auto w = completion(s)) return *w;
    const int ply = s.marked_count();
    if (ply == 0) {
      if (auto m = toward_a(s, c3_at_a_, false)) return *m;
      throw StrategyFailure(b(), "triangle-opening", std::nullopt, std::nullopt, "no triangle edge can point at a");
    }
    const TriangleCase tc = triangle_case(s);
    if (ply == 2) {
      switch (tc) {
        case TriangleCase::Case1:
          if (auto m = toward_a(s, cn_at_a_, true)) return *m;
          break;
        case TriangleCase::Case2: {
          const Move m = mirror_reverse(s.history()[1]);
          if (!safe(s, m)) fail(s, "triangle-case2-mirror", m);
          return m;
        }
        case TriangleCase::Case3:
          if (auto m = toward_a(s, c3_at_a_, false)) return *m;
          throw StrategyFailure(b(), "triangle-case3", std::nullopt, std::nullopt,
                                "the other triangle edge at a cannot point at a");
        case TriangleCase::Undecided: break;
      }
      return triangle_generic(s);
    }
    if (ply == 4 && tc == TriangleCase::Case2) {
      if (auto m = toward_a(s, c3_at_a_, false)) return *m;
      if (!std::all_of(c3_at_a_.begin(), c3_at_a_.end(), [&](EdgeId e) { return into_a(s, e); }))
        throw StrategyFailure(b(), "triangle-case2", std::nullopt, std::nullopt,
                              "the other triangle edge at a points away from a");
      if (auto m = make_almost_sink(s)) return *m;
      return triangle_generic(s);
    }
    if ((ply == 4 && tc == TriangleCase::Case3) || (ply == 6 && tc == TriangleCase::Case2))
      if (auto m = make_almost_sink(s)) return *m;
    return triangle_generic(s);
  }

  BoardPtr board_;
  StrategyKind kind_;
  Player role_;
  StrategyOptions opts_;
  std::vector<CellId> si_cycle_;  // owning cell of each SI edge, -1 otherwise
  std::vector<std::array<Move, 2>> mirror_;
  std::optional<AxisSet> axes_;
  std::optional<Involution> involution_;
  std::optional<EdgeId> opening_;
  std::vector<std::pair<EdgeId, EdgeId>> pairing_;
  std::shared_ptr<Solver> solver_;
  // triangle
  std::optional<TriangleShape> shape_;
  std::vector<int> dist_a_;
  std::vector<EdgeId> c3_at_a_, cn_at_a_;
};

}  // namespace goc
