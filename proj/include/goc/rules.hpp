#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "goc/board.hpp"

namespace goc {

enum class Direction : std::uint8_t { Forward, Backward };
enum class Mark : std::uint8_t { Unmarked = 0, Forward = 1, Backward = 2 };
enum class Player : std::uint8_t { One = 1, Two = 2 };

inline constexpr Player other(Player p) { return p == Player::One ? Player::Two : Player::One; }
inline constexpr int to_int(Player p) { return static_cast<int>(p); }
inline constexpr Mark to_mark(Direction d) { return d == Direction::Forward ? Mark::Forward : Mark::Backward; }
inline constexpr Direction flip(Direction d) { return d == Direction::Forward ? Direction::Backward : Direction::Forward; }
inline constexpr char direction_code(Direction d) { return d == Direction::Forward ? 'F' : 'B'; }

// Moves order by (edge id, FORWARD before BACKWARD).
struct Move {
  EdgeId edge = 0;
  Direction direction = Direction::Forward;
  auto operator<=>(const Move&) const = default;
};

inline VertexId tail(const Board& b, Move m) {
  const auto& e = b.edge(m.edge);
  return m.direction == Direction::Forward ? e.u : e.v;
}
inline VertexId head(const Board& b, Move m) {
  const auto& e = b.edge(m.edge);
  return m.direction == Direction::Forward ? e.v : e.u;
}
// The move on edge {from, to} pointing from -> to, if that edge exists.
inline std::optional<Move> move_between(const Board& b, VertexId from, VertexId to) {
  const auto e = b.find_edge(from, to);
  if (!e) return std::nullopt;
  return Move{*e, b.edge(*e).u == from ? Direction::Forward : Direction::Backward};
}

inline std::string describe(const Board& b, Move m) {
  return std::to_string(m.edge) + ":" + b.vertex_name(tail(b, m)) + "->" + b.vertex_name(head(b, m));
}

struct VertexStatus {
  int in_count = 0;
  int out_count = 0;
  int unmarked_count = 0;
  bool is_sink = false;
  bool is_source = false;
  bool is_almost_sink = false;
  bool is_almost_source = false;
};

struct DirectionStatus {
  bool legal = false;
  bool completes_cycle = false;
  bool death = false;
};

struct EdgeStatus {
  bool marked = false;
  DirectionStatus forward;
  DirectionStatus backward;
  bool markable = false;
  bool unmarkable = false;  // unmarked and no legal direction
  bool currently_playable = false;
  const DirectionStatus& of(Direction d) const { return d == Direction::Forward ? forward : backward; }
};

// Why a mark is rejected by the sink-source rule.
struct Violation {
  enum class Kind { AlreadyMarked, Sink, Source, GameOver } kind;
  VertexId vertex = -1;
};

inline std::string describe(const Board& b, const Violation& v) {
  switch (v.kind) {
    case Violation::Kind::AlreadyMarked: return "edge already marked";
    case Violation::Kind::Sink: return "creates a sink at vertex " + b.vertex_name(v.vertex);
    case Violation::Kind::Source: return "creates a source at vertex " + b.vertex_name(v.vertex);
    case Violation::Kind::GameOver: return "game is already over";
  }
  return "illegal move";
}

class RuleViolation : public std::runtime_error {
 public:
  RuleViolation(const Board& b, Move m, Violation v)
      : std::runtime_error("illegal move " + describe(b, m) + ": " + describe(b, v)), move_(m), violation_(v) {}
  Move move() const { return move_; }
  const Violation& violation() const { return violation_; }

 private:
  Move move_;
  Violation violation_;
};

// ---------------------------------------------------------------------------
// Kernel over raw mark vectors. The solver and verifier use these directly on
// a mutable marks buffer; GameState wraps them for everyone else.
namespace kernel {

using Marks = std::vector<Mark>;

inline bool points_into(const Board& b, EdgeId e, Mark m, VertexId v) {
  const auto& r = b.edge(e);
  return (m == Mark::Forward && r.v == v) || (m == Mark::Backward && r.u == v);
}

inline VertexStatus vertex_status(const Board& b, std::span<const Mark> marks, VertexId v) {
  VertexStatus s;
  for (EdgeId e : b.incident(v)) {
    if (marks[e] == Mark::Unmarked)
      ++s.unmarked_count;
    else if (points_into(b, e, marks[e], v))
      ++s.in_count;
    else
      ++s.out_count;
  }
  const int deg = b.degree(v);
  s.is_sink = deg >= 1 && s.in_count == deg;
  s.is_source = deg >= 1 && s.out_count == deg;
  s.is_almost_sink = s.in_count == deg - 1 && s.unmarked_count == 1;
  s.is_almost_source = s.out_count == deg - 1 && s.unmarked_count == 1;
  return s;
}

// Sink-source rule only (no game-over check).
inline std::optional<Violation> violation(const Board& b, std::span<const Mark> marks, Move m) {
  if (marks[m.edge] != Mark::Unmarked) return Violation{Violation::Kind::AlreadyMarked, -1};
  const VertexId t = tail(b, m), h = head(b, m);
  // The head becomes a sink iff every other incident edge already points in.
  bool head_has_out = false, tail_has_in = false;
  for (EdgeId e : b.incident(h)) {
    if (e == m.edge) continue;
    if (marks[e] == Mark::Unmarked || !points_into(b, e, marks[e], h)) head_has_out = true;
  }
  if (!head_has_out) return Violation{Violation::Kind::Sink, h};
  for (EdgeId e : b.incident(t)) {
    if (e == m.edge) continue;
    if (marks[e] == Mark::Unmarked || points_into(b, e, marks[e], t)) tail_has_in = true;
  }
  if (!tail_has_in) return Violation{Violation::Kind::Source, t};
  return std::nullopt;
}

inline bool is_legal(const Board& b, std::span<const Mark> marks, Move m) { return !violation(b, marks, m); }

// The walk orientation a mark takes inside a cell: +1 along the walk, -1 against.
inline int cell_sense(const CellRecord& c, std::size_t i, Mark m) {
  if (m == Mark::Unmarked) return 0;
  const bool forward = m == Mark::Forward;
  return forward == c.aligned[i] ? 1 : -1;
}

inline bool cell_completed(const CellRecord& c, std::span<const Mark> marks) {
  int sense = 0;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    const int s = cell_sense(c, i, marks[c.edges[i]]);
    if (s == 0) return false;
    if (sense == 0) sense = s;
    if (s != sense) return false;
  }
  return true;
}

inline std::optional<CellId> completed_cycle_cell(const Board& b, std::span<const Mark> marks) {
  for (const auto& c : b.cells())
    if (cell_completed(c, marks)) return c.id;
  return std::nullopt;
}

// Would marking `m` complete some cell containing its edge?
inline bool completes_cycle(const Board& b, std::span<const Mark> marks, Move m) {
  const Mark mk = to_mark(m.direction);
  for (CellId cid : b.edge_cells(m.edge)) {
    const auto& c = b.cell(cid);
    int sense = 0;
    bool ok = true;
    for (std::size_t i = 0; i < c.edges.size() && ok; ++i) {
      const Mark here = c.edges[i] == m.edge ? mk : marks[c.edges[i]];
      const int s = cell_sense(c, i, here);
      if (s == 0 || (sense != 0 && s != sense)) ok = false;
      if (sense == 0) sense = s;
    }
    if (ok) return true;
  }
  return false;
}

// If the cell has exactly one unmarked edge and the rest agree, the mark that would complete it.
inline std::optional<Move> completion_of(const CellRecord& c, std::span<const Mark> marks) {
  int sense = 0;
  std::optional<std::size_t> hole;
  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    const int s = cell_sense(c, i, marks[c.edges[i]]);
    if (s == 0) {
      if (hole) return std::nullopt;
      hole = i;
      continue;
    }
    if (sense == 0) sense = s;
    if (s != sense) return std::nullopt;
  }
  if (!hole) return std::nullopt;
  const bool forward = (sense == 1) == c.aligned[*hole];
  return Move{c.edges[*hole], forward ? Direction::Forward : Direction::Backward};
}

// Lowest legal completing move, if any.
inline std::optional<Move> winning_completion(const Board& b, std::span<const Mark> marks) {
  std::optional<Move> best;
  for (const auto& c : b.cells()) {
    const auto m = completion_of(c, marks);
    if (m && is_legal(b, marks, *m) && (!best || *m < *best)) best = m;
  }
  return best;
}

inline bool game_over(const Board& b, std::span<const Mark> marks) {
  return completed_cycle_cell(b, marks).has_value();
}

inline void legal_moves(const Board& b, std::span<const Mark> marks, std::vector<Move>& out) {
  out.clear();
  if (game_over(b, marks)) return;
  for (EdgeId e = 0; e < b.edge_count(); ++e) {
    if (marks[e] != Mark::Unmarked) continue;
    for (Direction d : {Direction::Forward, Direction::Backward})
      if (is_legal(b, marks, {e, d})) out.push_back({e, d});
  }
}

inline bool has_legal_move(const Board& b, std::span<const Mark> marks) {
  for (EdgeId e = 0; e < b.edge_count(); ++e) {
    if (marks[e] != Mark::Unmarked) continue;
    if (is_legal(b, marks, {e, Direction::Forward}) || is_legal(b, marks, {e, Direction::Backward})) return true;
  }
  return false;
}

// Legal `m` hands the opponent an immediate legal cycle completion. A move that
// itself completes a cycle ends the game and is never a death move.
inline bool is_death_move(const Board& b, Marks& marks, Move m) {
  if (completes_cycle(b, marks, m)) return false;
  marks[m.edge] = to_mark(m.direction);
  const bool death = winning_completion(b, marks).has_value();
  marks[m.edge] = Mark::Unmarked;
  return death;
}

inline int marked_count(std::span<const Mark> marks) {
  int n = 0;
  for (Mark m : marks) n += m != Mark::Unmarked;
  return n;
}

}  // namespace kernel

// ---------------------------------------------------------------------------

enum class OutcomeKind { Ongoing, WinByCycle, WinByLastMove };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Ongoing;
  std::optional<Player> winner;
  std::optional<CellId> cycle_cell;
  bool finished() const { return kind != OutcomeKind::Ongoing; }
};

inline const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Ongoing: return "ONGOING";
    case OutcomeKind::WinByCycle: return "WIN_BY_CYCLE";
    case OutcomeKind::WinByLastMove: return "WIN_BY_LAST_MOVE";
  }
  return "?";
}

/// Marks over a shared board plus the move history that produced them.
///
/// The player to move is derived from the number of marked edges (Player 1
/// when even). `play`/`undo` mutate in place for search; `apply_move` returns
/// a new state.
class GameState {
 public:
  explicit GameState(BoardPtr board) : board_(std::move(board)), marks_(board_->edge_count(), Mark::Unmarked) {}

  const Board& board() const { return *board_; }
  const BoardPtr& board_ptr() const { return board_; }
  const kernel::Marks& marks() const { return marks_; }
  Mark mark(EdgeId e) const { return marks_.at(e); }
  const std::vector<Move>& history() const { return history_; }
  int marked_count() const { return static_cast<int>(history_.size()); }
  Player to_move() const { return history_.size() % 2 == 0 ? Player::One : Player::Two; }
  std::optional<Move> last_move() const {
    if (history_.empty()) return std::nullopt;
    return history_.back();
  }

  VertexStatus vertex_status(VertexId v) const {
    if (v < 0 || v >= board_->vertex_count()) throw InvalidArgument("unknown vertex " + std::to_string(v));
    return kernel::vertex_status(*board_, marks_, v);
  }

  bool is_legal(Move m) const {
    if (m.edge < 0 || m.edge >= board_->edge_count()) return false;
    return kernel::is_legal(*board_, marks_, m);
  }

  std::vector<Move> legal_moves() const {
    std::vector<Move> out;
    kernel::legal_moves(*board_, marks_, out);
    return out;
  }

  std::optional<CellId> completed_cycle_cell() const { return kernel::completed_cycle_cell(*board_, marks_); }

  bool completes_cycle(Move m) const { return kernel::completes_cycle(*board_, marks_, m); }

  bool is_death_move(Move m) const {
    if (!is_legal(m)) throw std::logic_error("is_death_move requires a legal move, got " + describe(*board_, m));
    auto scratch = marks_;
    return kernel::is_death_move(*board_, scratch, m);
  }

  EdgeStatus edge_status(EdgeId e) const {
    if (e < 0 || e >= board_->edge_count()) throw InvalidArgument("unknown edge " + std::to_string(e));
    EdgeStatus s;
    s.marked = marks_[e] != Mark::Unmarked;
    if (s.marked) return s;
    auto scratch = marks_;
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      DirectionStatus& ds = d == Direction::Forward ? s.forward : s.backward;
      const Move m{e, d};
      ds.legal = kernel::is_legal(*board_, marks_, m);
      if (!ds.legal) continue;
      ds.completes_cycle = kernel::completes_cycle(*board_, marks_, m);
      ds.death = kernel::is_death_move(*board_, scratch, m);
    }
    s.markable = s.forward.legal || s.backward.legal;
    s.unmarkable = !s.markable;
    auto playable = [](const DirectionStatus& d) { return d.legal && (d.completes_cycle || !d.death); };
    s.currently_playable = playable(s.forward) || playable(s.backward);
    return s;
  }

  // Rejects already-marked edges, sinks, sources, and moves after a completed cycle.
  void play(Move m) {
    if (m.edge < 0 || m.edge >= board_->edge_count()) throw InvalidArgument("unknown edge " + std::to_string(m.edge));
    if (completed_cycle_cell()) throw RuleViolation(*board_, m, {Violation::Kind::GameOver, -1});
    if (auto v = kernel::violation(*board_, marks_, m)) throw RuleViolation(*board_, m, *v);
    marks_[m.edge] = to_mark(m.direction);
    history_.push_back(m);
  }

  void undo() {
    if (history_.empty()) throw std::logic_error("undo on an empty history");
    marks_[history_.back().edge] = Mark::Unmarked;
    history_.pop_back();
  }

  GameState apply_move(Move m) const {
    GameState next = *this;
    next.play(m);
    return next;
  }

  Outcome outcome() const {
    Outcome o;
    const Player previous = other(to_move());
    if (auto c = completed_cycle_cell()) {
      o.kind = OutcomeKind::WinByCycle;
      o.winner = previous;
      o.cycle_cell = c;
    } else if (!kernel::has_legal_move(*board_, marks_)) {
      o.kind = OutcomeKind::WinByLastMove;
      o.winner = previous;
    }
    return o;
  }

  bool operator==(const GameState& o) const { return *board_ == *o.board_ && marks_ == o.marks_ && history_ == o.history_; }

 private:
  BoardPtr board_;
  kernel::Marks marks_;
  std::vector<Move> history_;
};

inline GameState replay(BoardPtr board, std::span<const Move> moves) {
  GameState s(std::move(board));
  for (Move m : moves) s.play(m);
  return s;
}

// ---------------------------------------------------------------------------
// Move / replay JSON

inline nlohmann::json move_to_json(Move m) {
  return {{"edge", m.edge}, {"direction", std::string(1, direction_code(m.direction))}};
}

namespace detail {

inline VertexId vertex_ref(const Board& b, const nlohmann::json& j, const std::string& path) {
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    if (v < 0 || v >= b.vertex_count()) throw BoardError(path, "unknown vertex " + std::to_string(v));
    return v;
  }
  if (j.is_string()) {
    if (auto v = b.find_label(j.get<std::string>())) return *v;
    throw BoardError(path, "unknown vertex label '" + j.get<std::string>() + "'");
  }
  throw BoardError(path, "vertex reference must be an id or a label");
}

}  // namespace detail

// Accepts {"edge":7,"direction":"F"} or {"from":u,"to":v} (ids or labels).
inline Move move_from_json(const Board& b, const nlohmann::json& j, const std::string& path = "move") {
  if (!j.is_object()) throw BoardError(path, "expected an object");
  if (j.contains("edge")) {
    const int e = detail::require_int(j, "edge", path);
    if (e < 0 || e >= b.edge_count()) throw BoardError(path + ".edge", "unknown edge " + std::to_string(e));
    const auto& d = detail::require(j, "direction", path);
    if (d == "F") return {e, Direction::Forward};
    if (d == "B") return {e, Direction::Backward};
    throw BoardError(path + ".direction", "direction must be \"F\" or \"B\"");
  }
  const VertexId from = detail::vertex_ref(b, detail::require(j, "from", path), path + ".from");
  const VertexId to = detail::vertex_ref(b, detail::require(j, "to", path), path + ".to");
  if (auto m = move_between(b, from, to)) return *m;
  throw BoardError(path, "no edge between " + b.vertex_name(from) + " and " + b.vertex_name(to));
}

inline nlohmann::json replay_to_json(const GameState& s) {
  nlohmann::json moves = nlohmann::json::array();
  for (Move m : s.history()) moves.push_back(move_to_json(m));
  return {{"board", serialize_board(s.board())}, {"moves", moves}};
}

}  // namespace goc
