#include <gtest/gtest.h>

#include "goc/solver.hpp"

using namespace goc;

namespace {

BoardPtr shared(Board b) { return std::make_shared<const Board>(std::move(b)); }

// Unmemoized negamax straight from the definition.
bool naive_wins(GameState& s) {
  for (Move m : s.legal_moves()) {
    s.play(m);
    const bool good = s.outcome().kind == OutcomeKind::WinByCycle || !naive_wins(s);
    s.undo();
    if (good) return true;
  }
  return false;
}

Player naive_winner(BoardPtr b) {
  GameState s(b);
  return naive_wins(s) ? Player::One : Player::Two;
}

}  // namespace

TEST(Solver, CycleWinnerFollowsParity) {
  for (int n = 3; n <= 9; ++n) {
    const auto r = solve_board(shared(make_cycle_board(n)));
    ASSERT_FALSE(r.budget_exhausted);
    EXPECT_EQ(r.winner, n % 2 ? Player::One : Player::Two) << "n=" << n;
  }
}

TEST(Solver, MatchesNaiveSearchOnSmallBoards) {
  const std::vector<CactusSpec> specs = {
      {{3}, {}}, {{4}, {}}, {{5}, {}}, {{6}, {}}, {{3, 3}, {{0, 0, 1, 0}}},
      {{3, 4}, {{0, 0, 1, 0}}}, {{4, 4}, {{0, 0, 1, 0}}}, {{3, 5}, {{0, 0, 1, 0}}},
      {{3, 3, 3}, {{0, 0, 1, 0}, {0, 0, 2, 0}}}, {{3, 3, 3}, {{0, 0, 1, 0}, {1, 1, 2, 0}}},
  };
  for (const auto& spec : specs) {
    auto b = shared(build_cactus(spec));
    const auto r = solve_board(b);
    ASSERT_FALSE(r.budget_exhausted);
    EXPECT_EQ(*r.winner, naive_winner(b)) << serialize_cactus_spec(spec).dump();
  }
}

TEST(Solver, TriangleWithPentagonIsFirstPlayerWin) {
  const auto r = solve_board(shared(build_cactus({{3, 5}, {{0, 0, 1, 0}}})));
  ASSERT_FALSE(r.budget_exhausted);
  EXPECT_EQ(r.winner, Player::One);
  ASSERT_TRUE(r.best_move);
}

TEST(Solver, BestMoveIsLowestWinningMove) {
  auto b = shared(build_cactus({{3, 4}, {{0, 0, 1, 0}}}));
  GameState s(b);
  const auto r = solve_state(s);
  ASSERT_EQ(r.winner, Player::One);
  std::optional<Move> lowest;
  for (Move m : s.legal_moves()) {
    s.play(m);
    const bool wins = s.outcome().kind == OutcomeKind::WinByCycle || !naive_wins(s);
    s.undo();
    if (wins) {
      lowest = m;
      break;
    }
  }
  EXPECT_EQ(r.best_move, lowest);
}

TEST(Solver, LosingSideStillGetsAMove) {
  auto b = shared(make_cycle_board(4));
  const auto r = solve_board(b);
  ASSERT_EQ(r.winner, Player::Two);
  ASSERT_TRUE(r.best_move);
  EXPECT_EQ(*r.best_move, GameState(b).legal_moves().front());
}

TEST(Solver, FinishedPositionHasNoBestMove) {
  auto b = shared(make_cycle_board(3));
  GameState s(b);
  s.play({0, Direction::Forward});
  s.play({1, Direction::Forward});
  s.play({2, Direction::Backward});
  ASSERT_TRUE(s.outcome().finished());
  const auto r = solve_state(s);
  EXPECT_EQ(r.winner, Player::One);
  EXPECT_FALSE(r.best_move);
}

TEST(Solver, BudgetExhaustionOmitsWinner) {
  const auto r = solve_board(shared(build_cactus({{5, 9, 7}, {{0, 0, 1, 0}, {1, 4, 2, 0}}})), {.budget = 100});
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_FALSE(r.winner);
}

TEST(Solver, MemoAndThreadsDoNotChangeAnswers) {
  for (const auto& spec : std::vector<CactusSpec>{{{4, 5}, {{0, 0, 1, 0}}}, {{5, 5}, {{0, 0, 1, 0}}}, {{6}, {}}}) {
    auto b = shared(build_cactus(spec));
    const auto base = solve_board(b);
    const auto nomemo = solve_board(b, {.memo = false});
    const auto threaded = solve_board(b, {.threads = 4});
    const auto reversed = solve_board(b, {.reverse_move_order = true});
    EXPECT_EQ(base.winner, nomemo.winner);
    EXPECT_EQ(base.winner, threaded.winner);
    EXPECT_EQ(base.winner, reversed.winner);
    EXPECT_EQ(base.best_move, threaded.best_move);
  }
}

TEST(Solver, OutcomeLabelsAgreeWithChildSolves) {
  auto b = shared(build_cactus({{4, 5}, {{0, 0, 1, 0}}}));
  GameState s(b);
  s.play({0, Direction::Forward});
  const auto labels = outcome_labels(s);
  ASSERT_FALSE(labels.budget_exhausted);
  EXPECT_EQ(labels.labels.size(), s.legal_moves().size());
  for (auto [m, label] : labels.labels) {
    s.play(m);
    const bool wins = s.outcome().kind == OutcomeKind::WinByCycle || !naive_wins(s);
    s.undo();
    EXPECT_EQ(label == MoveLabel::Winning, wins) << describe(*b, m);
  }
}

TEST(Solver, PackedMarksRoundTrip) {
  kernel::Marks marks(64, Mark::Unmarked);
  marks[0] = Mark::Forward;
  marks[63] = Mark::Backward;
  marks[31] = Mark::Backward;
  const auto p = pack(marks);
  kernel::Marks other = marks;
  other[31] = Mark::Forward;
  EXPECT_FALSE(p == pack(other));
  EXPECT_TRUE(p == pack(marks));
  EXPECT_THROW(pack(kernel::Marks(65, Mark::Unmarked)), UnsupportedBoard);
}
