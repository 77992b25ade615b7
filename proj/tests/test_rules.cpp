#include <gtest/gtest.h>

#include <random>

#include "goc/rules.hpp"

using namespace goc;

namespace {

BoardPtr shared(Board b) { return std::make_shared<const Board>(std::move(b)); }

// Plain re-statements of the rules, written against the board records only.
bool points_in(const Board& b, EdgeId e, Mark m, VertexId v) {
  const auto& r = b.edge(e);
  return (m == Mark::Forward && r.v == v) || (m == Mark::Backward && r.u == v);
}

bool is_sink_or_source(const Board& b, const kernel::Marks& marks, VertexId v) {
  int in = 0, out = 0;
  for (EdgeId e : b.incident(v)) {
    if (marks[e] == Mark::Unmarked) return false;
    (points_in(b, e, marks[e], v) ? in : out)++;
  }
  return in == 0 || out == 0;
}

bool oracle_legal(const Board& b, kernel::Marks marks, Move m) {
  if (marks[m.edge] != Mark::Unmarked) return false;
  marks[m.edge] = to_mark(m.direction);
  const auto& e = b.edge(m.edge);
  return !is_sink_or_source(b, marks, e.u) && !is_sink_or_source(b, marks, e.v);
}

bool oracle_cycle(const Board& b, const kernel::Marks& marks) {
  for (const auto& c : b.cells()) {
    int with = 0, against = 0;
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
      const Mark m = marks[c.edges[i]];
      if (m == Mark::Unmarked) break;
      const bool forward_along = (m == Mark::Forward) == c.aligned[i];
      (forward_along ? with : against)++;
    }
    const int n = static_cast<int>(c.edges.size());
    if (with == n || against == n) return true;
  }
  return false;
}

bool oracle_death(const Board& b, kernel::Marks marks, Move m) {
  marks[m.edge] = to_mark(m.direction);
  if (oracle_cycle(b, marks)) return false;
  for (EdgeId e = 0; e < b.edge_count(); ++e)
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      if (!oracle_legal(b, marks, {e, d})) continue;
      auto next = marks;
      next[e] = to_mark(d);
      if (oracle_cycle(b, next)) return true;
    }
  return false;
}

Move mv(const Board& b, VertexId from, VertexId to) { return *move_between(b, from, to); }

}  // namespace

TEST(Rules, TriangleThirdMoveEitherClosesOrIsIllegal) {
  auto b = shared(make_cycle_board(3));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  s.play(mv(*b, 1, 2));
  EXPECT_TRUE(s.completes_cycle(mv(*b, 2, 0)));
  EXPECT_FALSE(s.is_legal(mv(*b, 0, 2)));  // 2 would be a sink, 0 a source
  s.play(mv(*b, 2, 0));
  const auto o = s.outcome();
  EXPECT_EQ(o.kind, OutcomeKind::WinByCycle);
  EXPECT_EQ(o.winner, Player::One);
  EXPECT_EQ(o.cycle_cell, 0);
  EXPECT_TRUE(s.legal_moves().empty());
}

TEST(Rules, ViolationNamesTheVertex) {
  auto b = shared(make_cycle_board(4));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  try {
    s.play(mv(*b, 2, 1));
    FAIL();
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.violation().kind, Violation::Kind::Sink);
    EXPECT_EQ(e.violation().vertex, 1);
    EXPECT_NE(std::string(e.what()).find("sink at vertex 1"), std::string::npos);
  }
  try {
    s.play(mv(*b, 0, 3));
    FAIL();
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.violation().kind, Violation::Kind::Source);
    EXPECT_EQ(e.violation().vertex, 0);
  }
  EXPECT_THROW(s.play(mv(*b, 0, 1)), RuleViolation);
  EXPECT_THROW(s.play({99, Direction::Forward}), InvalidArgument);
  EXPECT_EQ(s.marked_count(), 1);
}

TEST(Rules, NoMovesAfterCompletion) {
  auto b = shared(build_cactus({{3, 5}, {{0, 0, 1, 0}}}));
  GameState s(b);
  s.play({0, Direction::Forward});
  s.play({1, Direction::Forward});
  s.play({2, Direction::Backward});
  ASSERT_TRUE(s.outcome().finished());
  EXPECT_TRUE(s.legal_moves().empty());
  try {
    s.play({4, Direction::Forward});
    FAIL();
  } catch (const RuleViolation& e) {
    EXPECT_EQ(e.violation().kind, Violation::Kind::GameOver);
  }
}

TEST(Rules, LastMoveWinOnFourCycle) {
  // Arrows 0->1 and 3->2 leave edges {1,2} and {3,0} unmarkable.
  auto b = shared(make_cycle_board(4));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  s.play(mv(*b, 3, 2));
  const auto o = s.outcome();
  EXPECT_EQ(o.kind, OutcomeKind::WinByLastMove);
  EXPECT_EQ(o.winner, Player::Two);
  EXPECT_TRUE(s.edge_status(1).unmarkable);
  EXPECT_FALSE(s.edge_status(1).markable);
}

TEST(Rules, KernelAgreesWithOracleOnRandomPositions) {
  std::mt19937_64 rng(7);
  const std::vector<Board> boards = {make_cycle_board(5), build_cactus({{3, 5}, {{0, 0, 1, 0}}}),
                                     build_cactus({{4, 4, 5}, {{0, 0, 1, 0}, {1, 2, 2, 0}}})};
  int checked = 0;
  for (const auto& raw : boards) {
    auto b = shared(raw);
    for (int game = 0; game < 200; ++game) {
      GameState s(b);
      while (!s.outcome().finished()) {
        for (EdgeId e = 0; e < b->edge_count(); ++e)
          for (Direction d : {Direction::Forward, Direction::Backward}) {
            const Move m{e, d};
            const bool legal = oracle_legal(*b, s.marks(), m);
            ASSERT_EQ(s.is_legal(m), legal);
            if (!legal) continue;
            auto after = s.marks();
            after[e] = to_mark(d);
            ASSERT_EQ(s.completes_cycle(m), oracle_cycle(*b, after));
            ASSERT_EQ(s.is_death_move(m), oracle_death(*b, s.marks(), m));
            ++checked;
          }
        const auto moves = s.legal_moves();
        ASSERT_FALSE(moves.empty());
        s.play(moves[rng() % moves.size()]);
      }
      EXPECT_EQ(s.outcome().kind == OutcomeKind::WinByCycle, oracle_cycle(*b, s.marks()));
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Rules, LegalMovesAreSortedAndComplete) {
  auto b = shared(build_cactus({{4, 5}, {{0, 0, 1, 0}}}));
  GameState s(b);
  s.play({0, Direction::Forward});
  const auto moves = s.legal_moves();
  EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
  int expected = 0;
  for (EdgeId e = 0; e < b->edge_count(); ++e)
    for (Direction d : {Direction::Forward, Direction::Backward}) expected += oracle_legal(*b, s.marks(), {e, d});
  EXPECT_EQ(static_cast<int>(moves.size()), expected);
}

TEST(Rules, VertexStatusFlags) {
  auto b = shared(make_cycle_board(5));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  const auto v1 = s.vertex_status(1);
  EXPECT_EQ(v1.in_count, 1);
  EXPECT_EQ(v1.unmarked_count, 1);
  EXPECT_TRUE(v1.is_almost_sink);
  EXPECT_FALSE(v1.is_almost_source);
  EXPECT_TRUE(s.vertex_status(0).is_almost_source);
  EXPECT_FALSE(s.vertex_status(3).is_almost_sink);
  EXPECT_THROW(s.vertex_status(9), InvalidArgument);
}

TEST(Rules, DeathMoveOnFiveCycle) {
  // 0->1->2->3 marked: either coherent arrow on 3-4 or 4-0 hands over the cycle.
  auto b = shared(make_cycle_board(5));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  s.play(mv(*b, 1, 2));
  EXPECT_FALSE(s.is_death_move(mv(*b, 2, 3)));
  s.play(mv(*b, 2, 3));
  EXPECT_TRUE(s.is_death_move(mv(*b, 3, 4)));
  EXPECT_TRUE(s.is_death_move(mv(*b, 4, 0)));
  EXPECT_FALSE(s.is_legal(mv(*b, 4, 3)));  // 3 would be a sink
  EXPECT_FALSE(s.completes_cycle(mv(*b, 3, 4)));
  EXPECT_THROW(s.is_death_move(mv(*b, 1, 0)), std::logic_error);
}

TEST(Rules, UndoRestoresState) {
  auto b = shared(make_cycle_board(6));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  const GameState before = s;
  s.play(mv(*b, 3, 4));
  s.undo();
  EXPECT_EQ(s, before);
  const GameState after = s.apply_move(mv(*b, 3, 4));
  EXPECT_EQ(s, before);
  EXPECT_EQ(after.marked_count(), 2);
  EXPECT_EQ(after.to_move(), Player::One);
}

TEST(Rules, MoveJsonForms) {
  Board raw = make_cycle_board(4);
  auto j = serialize_board(raw);
  j["vertices"][2]["label"] = "C";
  const Board b = parse_board(j);
  EXPECT_EQ(move_from_json(b, {{"edge", 1}, {"direction", "B"}}), (Move{1, Direction::Backward}));
  EXPECT_EQ(move_from_json(b, {{"from", "C"}, {"to", 1}}), (Move{1, Direction::Backward}));
  EXPECT_EQ(move_from_json(b, move_to_json({3, Direction::Forward})), (Move{3, Direction::Forward}));
  EXPECT_THROW(move_from_json(b, {{"from", 0}, {"to", "C"}}), BoardError);
  EXPECT_THROW(move_from_json(b, {{"edge", 1}, {"direction", "X"}}), BoardError);
  EXPECT_THROW(move_from_json(b, {{"edge", 9}, {"direction", "F"}}), BoardError);
  EXPECT_EQ(describe(b, Move{1, Direction::Backward}), "1:C->1");
}

TEST(Rules, ReplayReproducesHistory) {
  auto b = shared(make_cycle_board(5));
  GameState s(b);
  s.play(mv(*b, 0, 1));
  s.play(mv(*b, 3, 2));
  s.play(mv(*b, 4, 3));
  EXPECT_EQ(replay(b, s.history()), s);
  const auto j = replay_to_json(s);
  EXPECT_EQ(j["moves"].size(), 3u);
}
