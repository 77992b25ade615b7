#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "goc/verify.hpp"

using namespace goc;

namespace {

Fixture fixture(const std::string& name) { return load_fixture(std::string(GOC_FIXTURES_DIR) + "/" + name); }

// Brute force over all vertex permutations: self-inverse, non-identity,
// edge-preserving and cell-set-preserving.
int count_involutions_naive(const Board& b) {
  std::vector<VertexId> p(b.vertex_count());
  std::iota(p.begin(), p.end(), 0);
  int count = 0;
  do {
    bool ok = false;
    for (VertexId v = 0; v < b.vertex_count(); ++v) {
      if (p[p[v]] != v) {
        ok = false;
        break;
      }
      ok |= p[v] != v;
    }
    if (!ok) continue;
    for (const auto& e : b.edges()) ok &= b.find_edge(p[e.u], p[e.v]).has_value();
    for (const auto& c : b.cells()) {
      std::set<VertexId> img;
      for (VertexId v : c.walk) img.insert(p[v]);
      ok &= std::any_of(b.cells().begin(), b.cells().end(), [&](const CellRecord& d) {
        return std::set<VertexId>(d.walk.begin(), d.walk.end()) == img;
      });
    }
    count += ok;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

}  // namespace

TEST(Involutions, MatchBruteForceOnSmallBoards) {
  const std::vector<Board> boards = {make_cycle_board(4), make_cycle_board(5), make_cycle_board(6),
                                     build_cactus({{3, 3}, {{0, 0, 1, 0}}}), build_cactus({{4, 4}, {{0, 0, 1, 0}}}),
                                     build_cactus({{3, 5}, {{0, 0, 1, 0}}})};
  for (const auto& b : boards) EXPECT_EQ(static_cast<int>(find_involutions(b).size()), count_involutions_naive(b));
}

TEST(Involutions, AreAutomorphismsOfOrderTwo) {
  const Board b = build_cactus({{4, 4}, {{0, 0, 1, 0}}});
  for (const auto& inv : find_involutions(b)) {
    for (VertexId v = 0; v < b.vertex_count(); ++v) EXPECT_EQ(inv.vertex_map[inv.vertex_map[v]], v);
    for (EdgeId e = 0; e < b.edge_count(); ++e) {
      const auto& r = b.edge(e);
      EXPECT_EQ(b.find_edge(inv.vertex_map[r.u], inv.vertex_map[r.v]), inv.edge_map[e]);
    }
  }
}

TEST(Involutions, GuardOnLargeBoards) {
  EXPECT_THROW(find_involutions(make_cycle_board(17)), UnsupportedBoard);
  EXPECT_NO_THROW(find_involutions(make_cycle_board(16)));
}

TEST(Involutions, SwapOfTwoEqualCyclesMovesCellsNowhere) {
  const Board b = build_cactus({{5, 5}, {{0, 0, 1, 0}}});
  const auto invs = find_involutions(b);
  const bool has_swap = std::any_of(invs.begin(), invs.end(), [](const Involution& i) {
    return i.cell_map[0] == 1 && i.cell_class[0] == CellClass::Nowhere;
  });
  EXPECT_TRUE(has_swap);
}

TEST(Axes, CycleReflectionsByParity) {
  for (int m = 4; m <= 9; ++m) {
    const Board b = make_cycle_board(m);
    const auto axes = enumerate_axes(b, 0);
    ASSERT_EQ(static_cast<int>(axes.size()), m);
    int si_total = 0;
    for (const auto& a : axes) {
      si_total += static_cast<int>(a.fixed_edges.size());
      if (m % 2) EXPECT_EQ(a.kind(), AxisKind::VertexEdge);
      else EXPECT_NE(a.kind(), AxisKind::VertexEdge);
      for (auto [v, w] : a.vertex_partner) EXPECT_EQ(a.partner(w), v);
      for (auto [e, f] : a.edge_partner) EXPECT_EQ(a.partner_edge(f), e);
    }
    EXPECT_EQ(si_total, m);  // odd: one per axis; even: half the axes fix two edges
  }
}

TEST(Axes, OrderingIsByFixedVertexThenEdge) {
  const auto axes = enumerate_axes(make_cycle_board(6), 0);
  auto key = [](const Axis& a) {
    return std::pair{a.fixed_vertices.empty() ? 1 << 30 : a.fixed_vertices.front(),
                     a.fixed_edges.empty() ? 1 << 30 : a.fixed_edges.front()};
  };
  EXPECT_TRUE(std::is_sorted(axes.begin(), axes.end(), [&](auto& x, auto& y) { return key(x) < key(y); }));
  EXPECT_EQ(axes.front().fixed_vertices, (std::vector<VertexId>{0, 3}));
}

TEST(AxisSets, OddSelfInvolutiveCountOnThreeCycleBoard) {
  const auto f = fixture("c9_c5_c7_game.json");
  const auto s = select_axis_set(*f.board);
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->valid());
  EXPECT_EQ(s->si_edges.size(), 3u);
  EXPECT_EQ(s->si_parity, Parity::Odd);
}

TEST(AxisSets, EvenSelfInvolutiveCountOnEightCycleBoard) {
  const auto f = fixture("c8_c5_c7_game.json");
  const auto s = select_axis_set(*f.board);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->si_edges.size(), 2u);
  EXPECT_EQ(s->si_parity, Parity::Even);
}

TEST(AxisSets, FourCycleBoardHasNone) {
  const auto f = fixture("four_cycle_failure.json");
  EXPECT_FALSE(select_axis_set(*f.board));
  ASSERT_TRUE(f.axes);
  EXPECT_TRUE(f.axes->property1_ok);
  EXPECT_FALSE(f.axes->property2_ok);
  const VertexId a = *f.board->find_label("a");
  for (const auto& ax : f.axes->axes) EXPECT_FALSE(ax.fixes(a));
}

TEST(AxisSets, RepairedBoardHasValidSet) {
  const auto f = fixture("five_cycle_repaired.json");
  const auto s = select_axis_set(*f.board);
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->valid());
  EXPECT_EQ(s->si_edges.size(), 5u);
  const auto all = all_axis_sets(*f.board);
  EXPECT_EQ(all.size(), 1u);
}

TEST(AxisSets, SelectedSetSatisfiesBothPropertiesDirectly) {
  const auto f = fixture("c9_c5_c7_game.json");
  const Board& b = *f.board;
  const auto s = *select_axis_set(b);
  for (VertexId v = 0; v < b.vertex_count(); ++v) {
    if (b.degree(v) < 4) continue;
    int fixed_by = 0;
    for (const auto& a : s.axes) fixed_by += a.fixes(v);
    EXPECT_GE(fixed_by, 1) << b.vertex_name(v);
    for (const auto& a : s.axes) {
      if (!a.vertex_partner.contains(v)) continue;
      EXPECT_GE(b.degree(a.partner(v)), 4);
    }
  }
}

TEST(AxisSets, TrianglesAreOutsideTheFamily) {
  EXPECT_THROW(select_axis_set(build_cactus({{3, 5}, {{0, 0, 1, 0}}})), UnsupportedBoard);
}

TEST(AxisSets, ParityInvariantAcrossValidSets) {
  for (const auto& spec : std::vector<CactusSpec>{{{5, 7}, {{0, 0, 1, 0}}},
                                                  {{6, 4}, {{0, 1, 1, 0}}},
                                                  {{5, 6, 4}, {{0, 0, 1, 0}, {1, 3, 2, 2}}}}) {
    const auto r = si_parity_invariance_check(build_cactus(spec));
    EXPECT_TRUE(r.consistent()) << serialize_cactus_spec(spec).dump();
  }
}

TEST(AxisSets, JsonRoundTrip) {
  const auto f = fixture("c9_c5_c7_game.json");
  const auto s = *select_axis_set(*f.board);
  const auto again = parse_axis_set(*f.board, axis_set_to_json(s));
  EXPECT_EQ(again.si_edges, s.si_edges);
  for (CellId c = 0; c < f.board->cell_count(); ++c) EXPECT_EQ(again.axis(c).reflection, s.axis(c).reflection);
}

TEST(AxisSets, ParseRejectsBadChoices) {
  const auto f = fixture("c5_c7_game.json");
  EXPECT_THROW(parse_axis_set(*f.board, nlohmann::json::parse(R"([{"cycle":0,"fixed":{"vertex":"A","edge":["A","B"]}}])")),
               BoardError);
  EXPECT_THROW(parse_axis_set(*f.board, nlohmann::json::parse(R"([{"cycle":0,"fixed":{"vertex":"A","edge":["C","D"]}}])")),
               BoardError);  // cell 1 missing
}
