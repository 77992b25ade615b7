#include <gtest/gtest.h>

#include <filesystem>

#include "goc/verify.hpp"

using namespace goc;

namespace {

Fixture fixture(const std::string& name) { return load_fixture(std::string(GOC_FIXTURES_DIR) + "/" + name); }

// Replay a counterexample line and report how the strategy ends up: a
// finished game lost by `role`, or a strategy failure on its turn.
std::string replay_line(BoardPtr b, StrategyKind kind, Player role, const std::vector<Move>& line,
                        StrategyOptions opts = {}) {
  auto session = StrategySession::create(b, kind, role, opts);
  GameState s(b);
  for (Move m : line) {
    if (s.to_move() == role) {
      if (session.next_move(s) != m) return "line disagrees with strategy";
    }
    s.play(m);
  }
  if (s.outcome().finished()) return s.outcome().winner == role ? "won" : "lost";
  if (s.to_move() != role) return "opponent to move";
  try {
    session.next_move(s);
  } catch (const StrategyFailure& e) {
    return e.what();
  }
  return "strategy still fine";
}

}  // namespace

TEST(VerifyStrategy, ProvesOddAndEvenThreeCycleBoards) {
  const auto odd = verify_strategy(fixture("c9_c5_c7_game.json").board, StrategyKind::ModifiedMirror, Player::One);
  EXPECT_EQ(odd.result, VerifyResult::Proved) << report_to_json(odd).dump();
  const auto even = verify_strategy(fixture("c8_c5_c7_game.json").board, StrategyKind::ModifiedMirror, Player::Two);
  EXPECT_EQ(even.result, VerifyResult::Proved) << report_to_json(even).dump();
  EXPECT_GT(odd.leaves, 0u);
}

TEST(VerifyStrategy, TriangleWithPentagon) {
  const auto r = verify_strategy(triangle_board(5), StrategyKind::Triangle, Player::One);
  EXPECT_EQ(r.result, VerifyResult::Proved) << report_to_json(r).dump();
}

TEST(VerifyStrategy, ProvedImpliesSolverAgrees) {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{4, 5}, {4, 6}, {5, 5}, {5, 6}, {4, 7}}) {
    auto b = two_cycle_board(m, n);
    const Player role = predicted_two_cycle_winner(m, n);
    const auto v = verify_strategy(b, StrategyKind::ModifiedMirror, role);
    ASSERT_EQ(v.result, VerifyResult::Proved) << m << "," << n;
    EXPECT_EQ(solve_board(b).winner, role) << m << "," << n;
  }
}

TEST(VerifyStrategy, LosingClaimIsRefutedWithReplayableLine) {
  // The second player cannot win a C5, even with perfect play.
  auto b = share(make_cycle_board(5));
  const auto r = verify_strategy(b, StrategyKind::Perfect, Player::Two);
  ASSERT_EQ(r.result, VerifyResult::Refuted);
  ASSERT_TRUE(r.lost);
  EXPECT_EQ(r.lost->winner, Player::One);
  EXPECT_EQ(replay_line(b, StrategyKind::Perfect, Player::Two, r.counterexample), "lost");
}

TEST(VerifyStrategy, FourCycleCounterexampleReplaysToSinkAtA) {
  const auto f = fixture("four_cycle_failure.json");
  const auto r = check_failure_reproduction(f);
  ASSERT_EQ(r.result, VerifyResult::Proved) << report_to_json(r).dump();
  StrategyOptions opts;
  opts.axes = f.axes;
  const auto ending = replay_line(f.board, StrategyKind::ModifiedMirror, Player::Two, r.counterexample, opts);
  EXPECT_NE(ending.find("creates a sink at vertex a"), std::string::npos) << ending;
}

TEST(VerifyStrategy, CollectingMoreClassesKeepsTheFirst) {
  const auto f = fixture("four_cycle_failure.json");
  VerifyOptions one{.budget = kDefaultBudget};
  one.strategy.axes = f.axes;
  VerifyOptions many = one;
  many.max_counterexamples = 8;
  const auto a = verify_strategy(f.board, StrategyKind::ModifiedMirror, Player::Two, one);
  const auto b = verify_strategy(f.board, StrategyKind::ModifiedMirror, Player::Two, many);
  ASSERT_EQ(a.result, VerifyResult::Refuted);
  ASSERT_EQ(b.result, VerifyResult::Refuted);
  EXPECT_EQ(a.counterexample, b.counterexample);
  EXPECT_GT(b.counterexamples.size(), 1u);
  for (const auto& c : b.counterexamples) {
    const auto ending = replay_line(f.board, StrategyKind::ModifiedMirror, Player::Two, c.line, one.strategy);
    EXPECT_TRUE(ending == "lost" || ending.rfind("strategy failure", 0) == 0) << ending;
  }
}

TEST(VerifyStrategy, TinyBudget) {
  const auto r = verify_strategy(fixture("c9_c5_c7_game.json").board, StrategyKind::ModifiedMirror, Player::One,
                                 {.budget = 50});
  EXPECT_EQ(r.result, VerifyResult::Budget);
}

TEST(Suites, CycleParity) {
  for (const auto& r : check_cycle_parity(9)) EXPECT_TRUE(r.proved()) << r.claim;
  EXPECT_THROW(check_cycle_parity(2), InvalidArgument);
}

TEST(Suites, UnmarkableParityWithTwoUnmarkableEdgesOnC4) {
  const auto r = check_unmarkable_parity(4);
  EXPECT_TRUE(r.proved());
  EXPECT_GT(r.details["terminals_by_unmarked"].value("2", 0), 0);
  EXPECT_THROW(check_unmarkable_parity(10), InvalidArgument);
}

TEST(Suites, TwoCycleCornerOfTable) {
  for (const auto& r : check_two_cycle_table(4, 5)) EXPECT_TRUE(r.proved()) << report_to_json(r).dump();
}

TEST(Suites, TriangleRecordsEdgeParity) {
  const auto rs = check_triangle_theorem(5, 5);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_TRUE(rs[0].proved());
  EXPECT_EQ(rs[0].details["edges"], 8);
  EXPECT_EQ(rs[0].details["edge_parity"], "EVEN");
}

TEST(Fixtures, AllReplayCleanly) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(GOC_FIXTURES_DIR)) {
    if (e.path().extension() != ".json") continue;
    const auto r = replay_fixture(e.path().string());
    EXPECT_TRUE(r.proved()) << e.path() << ": " << r.notes;
    ++n;
  }
  EXPECT_EQ(n, 8);
}

TEST(Fixtures, TamperedFixturesFail) {
  auto raw = fixture("c5_c7_game.json").raw;
  auto swapped = raw;
  swapped["moves"][2]["player"] = 2;
  EXPECT_FALSE(replay_fixture(parse_fixture(swapped)).proved());
  auto wrong_winner = raw;
  wrong_winner["expect"]["winner"] = 1;
  EXPECT_FALSE(replay_fixture(parse_fixture(wrong_winner)).proved());
  auto illegal = raw;
  illegal["moves"][1] = {{"from", "B"}, {"to", "C"}, {"player", 2}};  // makes B a source
  const auto r = replay_fixture(parse_fixture(illegal));
  EXPECT_FALSE(r.proved());
  EXPECT_NE(r.notes.find("source at vertex B"), std::string::npos) << r.notes;
  EXPECT_THROW(parse_fixture(nlohmann::json::object()), BoardError);
}

TEST(Properties, SmallRuns) {
  EXPECT_TRUE(check_random_playouts(2000, 3).proved());
  EXPECT_TRUE(check_memo_equivalence(7).proved());
  EXPECT_TRUE(check_si_parity_invariance(6).proved());
}

TEST(Reports, JsonShape) {
  const auto r = check_cycle_parity(3).front();
  const auto j = report_to_json(r);
  EXPECT_EQ(j["claim"], "cycle-parity:n=3");
  EXPECT_EQ(j["result"], "PROVED");
  EXPECT_FALSE(j.contains("counterexample"));
  EXPECT_EQ(describe_board(*two_cycle_board(5, 7)), "C5+C7 (12 edges)");
}
