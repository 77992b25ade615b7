#pragma once

#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "goc/board.hpp"
#include "goc/rules.hpp"
#include "goc/solver.hpp"
#include "goc/strategy.hpp"
#include "goc/symmetry.hpp"

namespace goc {

enum class VerifyResult { Proved, Refuted, Budget };

inline const char* verify_result_name(VerifyResult r) {
  switch (r) {
    case VerifyResult::Proved: return "PROVED";
    case VerifyResult::Refuted: return "REFUTED";
    case VerifyResult::Budget: return "BUDGET";
  }
  return "?";
}

struct FailureInfo {
  std::string rule;
  std::optional<Move> dictated;
  std::optional<Violation> violation;
  std::string message;
};

struct VerificationReport {
  std::string claim;
  std::string board;
  VerifyResult result = VerifyResult::Proved;
  std::vector<Move> counterexample;
  std::optional<FailureInfo> failure;  // set when the strategy itself broke
  std::optional<Outcome> lost;         // set when the strategy reached a lost terminal
  struct Counterexample {
    std::vector<Move> line;
    std::optional<FailureInfo> failure;
    std::optional<Outcome> lost;
  };
  std::vector<Counterexample> counterexamples;  // first one mirrors the fields above
  std::uint64_t leaves = 0;
  std::uint64_t nodes = 0;
  double seconds = 0;
  std::string notes;
  nlohmann::json details = nlohmann::json::object();
  BoardPtr board_ptr;  // for rendering moves by vertex name

  bool proved() const { return result == VerifyResult::Proved; }
};

inline std::string describe_board(const Board& b) {
  std::string s;
  for (const auto& c : b.cells()) s += (s.empty() ? "C" : "+C") + std::to_string(c.length());
  return s + " (" + std::to_string(b.edge_count()) + " edges)";
}

inline nlohmann::json report_to_json(const VerificationReport& r) {
  nlohmann::json j = {{"claim", r.claim}, {"board", r.board}, {"result", verify_result_name(r.result)},
                      {"leaves", r.leaves}, {"nodes", r.nodes}};
  auto name = [&](Move m) { return r.board_ptr ? describe(*r.board_ptr, m) : std::to_string(m.edge) + direction_code(m.direction); };
  if (!r.counterexample.empty() || r.result == VerifyResult::Refuted) {
    nlohmann::json line = nlohmann::json::array();
    for (Move m : r.counterexample) line.push_back(name(m));
    j["counterexample"] = line;
  }
  if (r.failure) {
    nlohmann::json f = {{"rule", r.failure->rule}, {"message", r.failure->message}};
    if (r.failure->dictated) f["dictated"] = name(*r.failure->dictated);
    if (r.failure->violation && r.board_ptr) f["violation"] = describe(*r.board_ptr, *r.failure->violation);
    j["failure"] = f;
  }
  if (r.lost) j["lost"] = {{"outcome", outcome_name(r.lost->kind)}, {"winner", to_int(*r.lost->winner)}};
  if (r.counterexamples.size() > 1) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& c : r.counterexamples) {
      nlohmann::json line = nlohmann::json::array();
      for (Move m : c.line) line.push_back(name(m));
      nlohmann::json e = {{"line", line}};
      if (c.failure) e["failure"] = c.failure->message;
      if (c.lost) e["lost"] = outcome_name(c.lost->kind);
      all.push_back(e);
    }
    j["counterexamples"] = all;
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

struct VerifyOptions {
  std::uint64_t budget = kDefaultBudget;  // states visited
  StrategyOptions strategy;
  // Keep searching past the first failure until this many distinct failure
  // classes are found (or the tree is exhausted).
  std::size_t max_counterexamples = 1;
};

namespace detail {

struct KeyedMarks {
  PackedMarks marks;
  int extra = 0;
  bool operator==(const KeyedMarks&) const = default;
};

struct KeyedMarksHash {
  std::size_t operator()(const KeyedMarks& k) const noexcept {
    return PackedMarksHash{}(k.marks) ^ (static_cast<std::size_t>(k.extra) * 0x9E3779B97F4A7C15ULL);
  }
};

struct Refuted {};

class StrategyWalk {
 public:
  StrategyWalk(StrategySession& session, VerificationReport& report, std::uint64_t budget, std::size_t max_classes)
      : session_(session), report_(report), budget_(budget), max_classes_(std::max<std::size_t>(1, max_classes)) {}

  // True when the strategy wins every line below `s`. Throws Refuted once
  // enough distinct failures are collected, or BudgetExhausted.
  bool run(GameState& s) {
    if (++report_.nodes > budget_) throw BudgetExhausted{};
    const Outcome o = s.outcome();
    if (o.finished()) {
      ++report_.leaves;
      if (o.winner == session_.role()) return true;
      record(s, std::nullopt, o);
      return false;
    }
    if (s.to_move() == session_.role()) {
      Move m;
      try {
        m = session_.next_move(s);
      } catch (const StrategyFailure& f) {
        record(s, FailureInfo{f.rule(), f.dictated(), f.violation(), f.what()}, std::nullopt);
        return false;
      }
      if (!s.is_legal(m)) {
        record(s, FailureInfo{"illegal", m, kernel::violation(s.board(), s.marks(), m), "strategy returned an illegal move"},
               std::nullopt);
        return false;
      }
      s.play(m);
      const bool ok = run(s);
      s.undo();
      return ok;
    }
    const KeyedMarks key{pack(s.marks()), session_.history_key(s)};
    if (auto it = seen_.find(key); it != seen_.end()) return it->second;
    bool ok = true;
    for (Move m : s.legal_moves()) {
      s.play(m);
      ok &= run(s);
      s.undo();
    }
    // Failing nodes are kept too: their failure classes are already recorded.
    seen_.emplace(key, ok);
    return ok;
  }

  std::size_t memo_size() const { return seen_.size(); }

 private:
  // One counterexample per failure class: rule, violation kind and vertex, or the lost outcome.
  void record(const GameState& s, std::optional<FailureInfo> f, std::optional<Outcome> lost) {
    std::string cls = lost ? std::string("lost:") + outcome_name(lost->kind) : f->rule;
    if (f && f->violation) cls += ":" + std::to_string(static_cast<int>(f->violation->kind)) + ":" + std::to_string(f->violation->vertex);
    if (!classes_.insert(cls).second) return;
    report_.counterexamples.push_back({s.history(), f, lost});
    if (report_.counterexamples.size() == 1) {
      report_.counterexample = s.history();
      report_.failure = f;
      report_.lost = lost;
    }
    if (classes_.size() >= max_classes_) throw Refuted{};
  }

  StrategySession& session_;
  VerificationReport& report_;
  std::uint64_t budget_;
  std::size_t max_classes_;
  std::set<std::string> classes_;
  std::unordered_map<KeyedMarks, bool, KeyedMarksHash> seen_;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Exhaustive check of a strategy against every opponent line. The strategy's
/// moves are forced; the opponent branches over all legal moves. Opponent
/// nodes are memoized on the marks plus the session's history key.
inline VerificationReport verify_strategy(BoardPtr board, StrategyKind kind, Player role, VerifyOptions opts = {},
                                          std::string claim = "") {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = claim.empty() ? std::string("strategy:") + strategy_name(kind) + ":role=" + std::to_string(to_int(role)) : claim;
  r.board = describe_board(*board);
  r.board_ptr = board;
  if (board->edge_count() > kMaxPackedEdges) throw UnsupportedBoard("verification supports at most 64 edges");
  auto session = StrategySession::create(board, kind, role, opts.strategy);
  GameState s(board);
  detail::StrategyWalk walk(session, r, opts.budget, opts.max_counterexamples);
  try {
    r.result = walk.run(s) ? VerifyResult::Proved : VerifyResult::Refuted;
  } catch (const detail::Refuted&) {
    r.result = VerifyResult::Refuted;
  } catch (const detail::BudgetExhausted&) {
    r.result = r.counterexamples.empty() ? VerifyResult::Budget : VerifyResult::Refuted;
    r.notes = "node budget exhausted";
  }
  r.details["memo_entries"] = walk.memo_size();
  r.seconds = detail::seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Theorem suites

inline BoardPtr share(Board b) { return std::make_shared<const Board>(std::move(b)); }

inline BoardPtr two_cycle_board(int m, int n) { return share(build_cactus({{m, n}, {{0, 0, 1, 0}}})); }

inline std::vector<VerificationReport> check_cycle_parity(int n_max, std::uint64_t budget = kDefaultBudget) {
  if (n_max < 3) throw InvalidArgument("n_max must be at least 3");
  std::vector<VerificationReport> out;
  for (int n = 3; n <= n_max; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r;
    r.claim = "cycle-parity:n=" + std::to_string(n);
    auto b = share(make_cycle_board(n));
    r.board = describe_board(*b);
    const auto s = solve_board(b, {.budget = budget});
    r.nodes = s.nodes_expanded;
    const Player expected = n % 2 ? Player::One : Player::Two;
    if (s.budget_exhausted) r.result = VerifyResult::Budget;
    else r.result = *s.winner == expected ? VerifyResult::Proved : VerifyResult::Refuted;
    if (s.winner) r.details["winner"] = to_int(*s.winner);
    r.details["expected"] = to_int(expected);
    r.seconds = detail::seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

/// Walk every reachable position of C_n; at each terminal that is not a cycle
/// win, the unmarked (hence unmarkable) edge count must be even.
inline VerificationReport check_unmarkable_parity(int n) {
  if (n < 3 || n > 9) throw InvalidArgument("unmarkable parity check supports 3 <= n <= 9");
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = "unmarkable-parity:n=" + std::to_string(n);
  auto b = share(make_cycle_board(n));
  r.board = describe_board(*b);
  r.board_ptr = b;
  std::unordered_set<PackedMarks, PackedMarksHash> seen;
  std::map<int, std::uint64_t> histogram;  // unmarked count at last-move terminals
  std::uint64_t odd = 0;
  kernel::Marks marks(n, Mark::Unmarked);
  std::vector<Move> line;
  std::function<void()> walk = [&] {
    if (!seen.insert(pack(marks)).second) return;
    ++r.nodes;
    if (kernel::game_over(*b, marks)) return;
    std::vector<Move> moves;
    kernel::legal_moves(*b, marks, moves);
    if (moves.empty()) {
      ++r.leaves;
      const int unmarked = n - kernel::marked_count(marks);
      ++histogram[unmarked];
      if (unmarked % 2 && odd++ == 0) r.counterexample = line;
      return;
    }
    for (Move m : moves) {
      marks[m.edge] = to_mark(m.direction);
      line.push_back(m);
      walk();
      line.pop_back();
      marks[m.edge] = Mark::Unmarked;
    }
  };
  walk();
  r.result = odd == 0 ? VerifyResult::Proved : VerifyResult::Refuted;
  for (auto [k, v] : histogram) r.details["terminals_by_unmarked"][std::to_string(k)] = v;
  r.details["odd_terminals"] = odd;
  r.seconds = detail::seconds_since(t0);
  return r;
}

inline Player predicted_two_cycle_winner(int m, int n) { return (m + n) % 2 ? Player::One : Player::Two; }

/// Two cycles joined at a vertex: different parity favours player 1, equal
/// parity player 2. Every pair is solved; pairs with m+n <= verify_max_sum are
/// also checked with the modified mirror-reverse strategy.
inline std::vector<VerificationReport> check_two_cycle_table(int lo, int hi, int verify_max_sum = 12,
                                                             std::uint64_t budget = kDefaultBudget) {
  std::vector<VerificationReport> out;
  for (int m = lo; m <= hi; ++m)
    for (int n = m; n <= hi; ++n) {
      const auto t0 = std::chrono::steady_clock::now();
      VerificationReport r;
      r.claim = "two-cycle:m=" + std::to_string(m) + ",n=" + std::to_string(n);
      auto b = two_cycle_board(m, n);
      r.board = describe_board(*b);
      r.board_ptr = b;
      const Player expected = predicted_two_cycle_winner(m, n);
      r.details["expected"] = to_int(expected);
      const auto s = solve_board(b, {.budget = budget});
      r.nodes = s.nodes_expanded;
      if (s.budget_exhausted) {
        r.result = VerifyResult::Budget;
        r.notes = "solver budget exhausted";
      } else {
        r.details["solver_winner"] = to_int(*s.winner);
        r.result = *s.winner == expected ? VerifyResult::Proved : VerifyResult::Refuted;
      }
      if (m + n <= verify_max_sum && r.result == VerifyResult::Proved) {
        auto v = verify_strategy(b, StrategyKind::ModifiedMirror, expected, {.budget = budget});
        r.details["strategy"] = verify_result_name(v.result);
        r.nodes += v.nodes;
        r.leaves = v.leaves;
        if (!v.proved()) {
          r.result = v.result;
          r.counterexample = v.counterexample;
          r.failure = v.failure;
          r.lost = v.lost;
        }
      }
      r.seconds = detail::seconds_since(t0);
      out.push_back(std::move(r));
    }
  return out;
}

/// Axis selection, parity prediction and an exhaustive check of the modified
/// mirror-reverse strategy for the predicted winner. The solver is consulted
/// as a second opinion when `solver_budget` is non-zero; running out of budget
/// there is noted but does not change the verdict.
inline VerificationReport check_main_theorem(BoardPtr board, std::string claim, std::uint64_t budget = kDefaultBudget,
                                             std::uint64_t solver_budget = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = std::move(claim);
  r.board = describe_board(*board);
  r.board_ptr = board;
  const auto axes = select_axis_set(*board);
  if (!axes) {
    r.result = VerifyResult::Refuted;
    r.notes = "no axis set satisfies both symmetry properties";
    r.seconds = detail::seconds_since(t0);
    return r;
  }
  const Player predicted = axes->si_parity == Parity::Odd ? Player::One : Player::Two;
  r.details["si_edges"] = axes->si_edges.size();
  r.details["si_parity"] = parity_name(axes->si_parity);
  r.details["predicted_winner"] = to_int(predicted);
  auto v = verify_strategy(board, StrategyKind::ModifiedMirror, predicted, {.budget = budget});
  r.result = v.result;
  r.counterexample = v.counterexample;
  r.failure = v.failure;
  r.lost = v.lost;
  r.leaves = v.leaves;
  r.nodes = v.nodes;
  r.notes = v.notes;
  if (solver_budget > 0) {
    const auto s = solve_board(board, {.budget = solver_budget});
    if (s.budget_exhausted) {
      r.details["solver"] = "BUDGET";
    } else {
      r.details["solver_winner"] = to_int(*s.winner);
      if (*s.winner != predicted) {
        r.result = VerifyResult::Refuted;
        r.notes = "solver disagrees with the predicted winner";
      }
    }
  }
  r.seconds = detail::seconds_since(t0);
  return r;
}

inline BoardPtr triangle_board(int n) { return share(build_cactus({{3, n}, {{0, 0, 1, 0}}})); }

inline std::vector<VerificationReport> check_triangle_theorem(int lo, int hi, std::uint64_t budget = kDefaultBudget) {
  std::vector<VerificationReport> out;
  for (int n = lo; n <= hi; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport r;
    r.claim = "triangle:n=" + std::to_string(n);
    auto b = triangle_board(n);
    r.board = describe_board(*b);
    r.board_ptr = b;
    r.details["edges"] = b->edge_count();
    r.details["edge_parity"] = b->edge_count() % 2 ? "ODD" : "EVEN";
    r.details["path"] = n % 2 ? "almost-sink" : "mirror";
    const auto s = solve_board(b, {.budget = budget});
    if (s.budget_exhausted) {
      r.result = VerifyResult::Budget;
      r.notes = "solver budget exhausted";
    } else {
      r.details["solver_winner"] = to_int(*s.winner);
      r.result = *s.winner == Player::One ? VerifyResult::Proved : VerifyResult::Refuted;
    }
    auto v = verify_strategy(b, StrategyKind::Triangle, Player::One, {.budget = budget});
    r.details["strategy"] = verify_result_name(v.result);
    r.nodes = s.nodes_expanded + v.nodes;
    r.leaves = v.leaves;
    if (r.result == VerifyResult::Proved && !v.proved()) {
      r.result = v.result;
      r.counterexample = v.counterexample;
      r.failure = v.failure;
      r.lost = v.lost;
    }
    r.seconds = detail::seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

/// Re-run the modified mirror-reverse check with shuffled SI pairings; every
/// seed must reach the same verdict as the sorted pairing.
inline VerificationReport check_pairing_independence(BoardPtr board, Player role, int seeds = 10,
                                                     std::uint64_t budget = kDefaultBudget, std::string claim = "") {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = claim.empty() ? "pairing-independence" : std::move(claim);
  r.board = describe_board(*board);
  r.board_ptr = board;
  const auto base = verify_strategy(board, StrategyKind::ModifiedMirror, role, {.budget = budget});
  r.details["base"] = verify_result_name(base.result);
  r.result = VerifyResult::Proved;
  for (int seed = 1; seed <= seeds; ++seed) {
    VerifyOptions o{.budget = budget};
    o.strategy.pairing_seed = seed;
    const auto v = verify_strategy(board, StrategyKind::ModifiedMirror, role, o);
    r.details["seeds"].push_back(verify_result_name(v.result));
    r.nodes += v.nodes;
    if (v.result == VerifyResult::Budget || base.result == VerifyResult::Budget) r.result = VerifyResult::Budget;
    else if (v.result != base.result) r.result = VerifyResult::Refuted;
  }
  r.seconds = detail::seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Fixtures: a board, an optional explicit axis choice and a numbered game.
//
// {"description": "...", "board": {...}, "axes": [...]?,
//  "moves": [{"from": "B", "to": "A", "player": 1}, ...],
//  "expect": {"outcome": "WIN_BY_CYCLE", "winner": 2, "moves": 10}}

struct Fixture {
  std::string name;
  std::string description;
  BoardPtr board;
  std::optional<AxisSet> axes;
  std::vector<Move> moves;
  std::vector<std::optional<int>> annotated_players;
  nlohmann::json expect;
  nlohmann::json raw;
};

inline Fixture parse_fixture(const nlohmann::json& j, std::string name = "") {
  Fixture f;
  f.name = std::move(name);
  f.raw = j;
  if (!j.is_object()) throw BoardError("", "fixture must be an object");
  f.description = j.value("description", "");
  f.board = share(parse_board(detail::require(j, "board", "")));
  if (j.contains("axes")) f.axes = parse_axis_set(*f.board, j["axes"]);
  const auto& moves = detail::require_array(j, "moves", "");
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const std::string path = "moves[" + std::to_string(i) + "]";
    f.moves.push_back(move_from_json(*f.board, moves[i], path));
    f.annotated_players.push_back(moves[i].contains("player") ? std::optional<int>(moves[i]["player"].get<int>())
                                                              : std::nullopt);
  }
  f.expect = j.value("expect", nlohmann::json::object());
  return f;
}

inline Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fixture " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw BoardError(path, e.what());
  }
  return parse_fixture(j, path);
}

inline std::optional<OutcomeKind> parse_outcome_kind(const std::string& s) {
  if (s == "ONGOING") return OutcomeKind::Ongoing;
  if (s == "WIN_BY_CYCLE") return OutcomeKind::WinByCycle;
  if (s == "WIN_BY_LAST_MOVE") return OutcomeKind::WinByLastMove;
  return std::nullopt;
}

/// Replay a fixture: every move legal, odd moves by player 1, and the final
/// position matching the expected outcome, winner and move count.
inline VerificationReport replay_fixture(const Fixture& f) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = "replay:" + (f.name.empty() ? f.description : f.name);
  r.board = describe_board(*f.board);
  r.board_ptr = f.board;
  GameState s(f.board);
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < f.moves.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    const int mover = number % 2 ? 1 : 2;
    if (f.annotated_players[i] && *f.annotated_players[i] != mover)
      problems.push_back("move " + std::to_string(number) + " annotated for player " +
                         std::to_string(*f.annotated_players[i]) + " but player " + std::to_string(mover) + " is to move");
    try {
      s.play(f.moves[i]);
    } catch (const RuleViolation& e) {
      problems.push_back("move " + std::to_string(number) + ": " + e.what());
      break;
    }
    ++r.nodes;
  }
  const Outcome o = s.outcome();
  r.details["outcome"] = outcome_name(o.kind);
  if (o.winner) r.details["winner"] = to_int(*o.winner);
  r.details["moves"] = s.marked_count();
  if (f.expect.contains("outcome")) {
    const auto want = parse_outcome_kind(f.expect["outcome"].get<std::string>());
    if (!want) problems.push_back("unknown expected outcome " + f.expect["outcome"].dump());
    else if (*want != o.kind) problems.push_back(std::string("outcome ") + outcome_name(o.kind) + ", expected " + f.expect["outcome"].get<std::string>());
  }
  if (f.expect.contains("winner") && (!o.winner || to_int(*o.winner) != f.expect["winner"].get<int>()))
    problems.push_back("winner mismatch");
  if (f.expect.contains("moves") && s.marked_count() != f.expect["moves"].get<int>())
    problems.push_back("game has " + std::to_string(s.marked_count()) + " moves, expected " + f.expect["moves"].dump());
  r.result = problems.empty() ? VerifyResult::Proved : VerifyResult::Refuted;
  for (const auto& p : problems) r.notes += (r.notes.empty() ? "" : "; ") + p;
  if (!problems.empty()) r.counterexample = s.history();
  r.seconds = detail::seconds_since(t0);
  return r;
}

inline VerificationReport replay_fixture(const std::string& path) { return replay_fixture(load_fixture(path)); }

/// A board where the modified mirror-reverse strategy should break: no axis set
/// may satisfy both properties, and with the fixture's explicit axes the
/// strategy must be refuted by a line whose dictated move makes a sink at the
/// expected vertex. The fixture's "strategy.failure" block names that vertex.
inline VerificationReport check_failure_reproduction(const Fixture& f, std::uint64_t budget = kDefaultBudget) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = "mmr-failure:" + describe_board(*f.board);
  r.board = describe_board(*f.board);
  r.board_ptr = f.board;
  if (!f.axes) throw BoardError("axes", "failure fixture needs explicit axes");
  const auto& spec = f.raw.at("strategy");
  const Player role = spec.value("role", 2) == 1 ? Player::One : Player::Two;
  const auto& want = spec.at("failure");
  const VertexId at = detail::vertex_ref(*f.board, want.at("vertex"), "strategy.failure.vertex");
  const bool no_axes = !select_axis_set(*f.board);
  r.details["axis_set"] = no_axes ? "absent" : "present";
  VerifyOptions opts{.budget = budget, .max_counterexamples = 64};
  opts.strategy.axes = f.axes;
  auto v = verify_strategy(f.board, StrategyKind::ModifiedMirror, role, opts, r.claim);
  r.details["strategy"] = verify_result_name(v.result);
  r.details["failure_classes"] = v.counterexamples.size();
  r.nodes = v.nodes;
  r.leaves = v.leaves;
  const VerificationReport::Counterexample* hit = nullptr;
  for (const auto& c : v.counterexamples)
    if (c.failure && c.failure->violation && c.failure->violation->kind == Violation::Kind::Sink &&
        c.failure->violation->vertex == at) {
      hit = &c;
      break;
    }
  if (hit) {
    r.counterexample = hit->line;
    r.failure = hit->failure;
  }
  r.result = no_axes && v.result == VerifyResult::Refuted && hit ? VerifyResult::Proved : VerifyResult::Refuted;
  if (v.result == VerifyResult::Budget && !hit) r.result = VerifyResult::Budget;
  if (!no_axes) r.notes = "an axis set exists";
  else if (!hit) r.notes = "no counterexample makes a sink at " + f.board->vertex_name(at);
  r.seconds = detail::seconds_since(t0);
  return r;
}

// ---------------------------------------------------------------------------
// Property suites

// Cactus boards with random cycle lengths and join points.
inline CactusSpec random_cactus_spec(std::mt19937_64& rng, int max_cycles, int min_len, int max_len) {
  std::uniform_int_distribution<int> count(1, max_cycles), len(min_len, max_len);
  CactusSpec spec;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) spec.cycles.push_back(len(rng));
  for (int i = 1; i < k; ++i) {
    const int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    const int pa = std::uniform_int_distribution<int>(0, spec.cycles[parent] - 1)(rng);
    spec.joins.push_back({parent, pa, i, 0});
  }
  return spec;
}

/// Random legal playouts; after every move, no vertex may be a sink or a source.
inline VerificationReport check_random_playouts(std::uint64_t playouts, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = "random-playouts:n=" + std::to_string(playouts);
  r.board = "random cacti";
  std::mt19937_64 rng(seed);
  std::vector<BoardPtr> boards;
  for (int i = 0; i < 64; ++i) boards.push_back(share(build_cactus(random_cactus_spec(rng, 4, 3, 8))));
  std::vector<Move> moves;
  for (std::uint64_t p = 0; p < playouts && r.result == VerifyResult::Proved; ++p) {
    const auto& b = boards[p % boards.size()];
    kernel::Marks marks(b->edge_count(), Mark::Unmarked);
    while (true) {
      kernel::legal_moves(*b, marks, moves);
      if (moves.empty()) break;
      const Move m = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
      marks[m.edge] = to_mark(m.direction);
      ++r.nodes;
      for (VertexId v = 0; v < b->vertex_count(); ++v) {
        int in = 0, out = 0;
        for (EdgeId e : b->incident(v)) {
          if (marks[e] == Mark::Unmarked) continue;
          (kernel::points_into(*b, e, marks[e], v) ? in : out)++;
        }
        if (in == b->degree(v) || out == b->degree(v)) {
          r.result = VerifyResult::Refuted;
          r.board_ptr = b;
          r.notes = "vertex " + b->vertex_name(v) + " became a sink or source";
        }
      }
    }
    ++r.leaves;
  }
  r.seconds = detail::seconds_since(t0);
  return r;
}

// Every cactus spec with at least one cycle, cycles >= 3 and total length <= max_edges,
// up to isomorphism of simple join patterns (chains and stars, all join points).
inline std::vector<CactusSpec> small_cactus_specs(int max_edges) {
  std::vector<CactusSpec> out;
  for (int a = 3; a <= max_edges; ++a) out.push_back({{a}, {}});
  for (int a = 3; a <= max_edges; ++a)
    for (int b = a; a + b <= max_edges; ++b) out.push_back({{a, b}, {{0, 0, 1, 0}}});
  for (int a = 3; a <= max_edges; ++a)
    for (int b = 3; a + b <= max_edges; ++b)
      for (int c = 3; a + b + c <= max_edges; ++c)
        for (int p = 0; p < b; ++p) out.push_back({{a, b, c}, {{0, 0, 1, 0}, {1, p, 2, 0}}});
  return out;
}

/// Memoized and plain search must agree on every small cactus.
inline VerificationReport check_memo_equivalence(int max_edges = 10) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = "memo-equivalence:edges<=" + std::to_string(max_edges);
  r.board = "small cacti";
  int boards = 0;
  for (const auto& spec : small_cactus_specs(max_edges)) {
    auto b = share(build_cactus(spec));
    const auto with = solve_board(b, {.memo = true});
    const auto without = solve_board(b, {.memo = false});
    ++boards;
    r.nodes += with.nodes_expanded + without.nodes_expanded;
    if (with.budget_exhausted || without.budget_exhausted) {
      r.result = VerifyResult::Budget;
      break;
    }
    if (with.winner != without.winner) {
      r.result = VerifyResult::Refuted;
      r.board = describe_board(*b);
      r.notes = "memoized and plain search disagree";
      break;
    }
  }
  r.details["boards"] = boards;
  r.seconds = detail::seconds_since(t0);
  return r;
}

// Triangle-free two- and three-cycle cacti with cycles of length 4..max_len.
inline std::vector<CactusSpec> axis_family_specs(int max_len) {
  std::vector<CactusSpec> out;
  for (int a = 4; a <= max_len; ++a)
    for (int b = a; b <= max_len; ++b) out.push_back({{a, b}, {{0, 0, 1, 0}}});
  for (int a = 4; a <= max_len; ++a)
    for (int b = 4; b <= max_len; ++b)
      for (int c = a; c <= max_len; ++c)
        for (int p = 0; p < b; ++p) out.push_back({{a, b, c}, {{1, 0, 0, 0}, {1, p, 2, 0}}});
  return out;
}

inline VerificationReport check_si_parity_invariance(int max_len = 8) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r;
  r.claim = "si-parity-invariance:len<=" + std::to_string(max_len);
  r.board = "two- and three-cycle cacti";
  int boards = 0, applicable = 0;
  std::uint64_t sets = 0;
  for (const auto& spec : axis_family_specs(max_len)) {
    auto b = build_cactus(spec);
    ++boards;
    const auto rep = si_parity_invariance_check(b);
    if (rep.axis_sets == 0) continue;
    ++applicable;
    sets += rep.axis_sets;
    if (!rep.consistent()) {
      r.result = VerifyResult::Refuted;
      r.board = describe_board(b);
      r.notes = "valid axis sets disagree on SI parity";
      break;
    }
  }
  r.details["boards"] = boards;
  r.details["boards_with_axis_sets"] = applicable;
  r.details["axis_sets"] = sets;
  r.nodes = sets;
  r.seconds = detail::seconds_since(t0);
  return r;
}

}  // namespace goc
