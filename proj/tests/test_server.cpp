#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include "goc/server.hpp"
#include "goc/verify.hpp"

using namespace goc;
using nlohmann::json;

namespace {

json fixture_board(const std::string& name) {
  return load_fixture(std::string(GOC_FIXTURES_DIR) + "/" + name).raw["board"];
}

int marked_edges(const json& view) {
  int n = 0;
  for (const auto& e : view["edges"]) n += e["marked"].get<bool>();
  return n;
}

json move(int edge, const char* dir) { return {{"edge", edge}, {"direction", dir}}; }

}  // namespace

TEST(GameService, CreateAgainstSecondPlayerEngineLeavesBoardEmpty) {
  GameService svc;
  const auto r = svc.create_game({{"cactus", {{"cycles", {5, 7}}, {"joins", {{0, 0, 1, 0}}}}}, {"engine", "mmr"}, {"engine_role", 2}});
  ASSERT_EQ(r.status, 201) << r.body.dump();
  EXPECT_EQ(r.body["edges"].size(), 12u);
  EXPECT_EQ(marked_edges(r.body), 0);
  EXPECT_EQ(r.body["status"], "ONGOING");
  EXPECT_EQ(r.body["id"].get<std::string>().size(), 32u);
}

TEST(GameService, EngineFirstOpens) {
  GameService svc;
  const auto r = svc.create_game({{"gen", "cycle:4"}, {"engine", "perfect"}, {"engine_role", 1}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(marked_edges(r.body), 1);
  EXPECT_TRUE(r.body.contains("engine_reply"));
  EXPECT_EQ(r.body["to_move"], 2);
}

TEST(GameService, InapplicableEngineIs422WithReason) {
  GameService svc;
  const auto r = svc.create_game({{"board", fixture_board("four_cycle_failure.json")}, {"engine", "mmr"}, {"engine_role", 2}});
  EXPECT_EQ(r.status, 422);
  EXPECT_NE(r.body["reason"].get<std::string>().find("axis set"), std::string::npos) << r.body.dump();
}

TEST(GameService, BadRequestsAre400) {
  GameService svc;
  EXPECT_EQ(svc.create_game({{"gen", "cycle:2"}}).status, 400);
  EXPECT_EQ(svc.create_game({{"board", {{"vertices", 1}}}}).status, 400);
  EXPECT_EQ(svc.create_game(json::array()).status, 400);
  EXPECT_EQ(svc.create_game({{"cycle", 5}, {"engine", "minimax"}}).status, 400);
  EXPECT_EQ(svc.create_game({{"cycle", 5}, {"engine", "perfect"}, {"engine_role", 3}}).status, 400);
}

TEST(GameService, EngineRepliesMatchAFreshSession) {
  GameService svc;
  const auto created = svc.create_game({{"board", fixture_board("c5_c7_game.json")}, {"engine", "mmr"}, {"engine_role", 2}});
  const std::string id = created.body["id"];
  const auto fx = load_fixture(std::string(GOC_FIXTURES_DIR) + "/c5_c7_game.json");
  // Play player 1's side of the recorded game; the engine should reproduce player 2's moves.
  for (std::size_t i = 0; i < fx.moves.size(); i += 2) {
    const auto r = svc.play_move(id, move_to_json(fx.moves[i]));
    ASSERT_EQ(r.status, 200) << r.body.dump();
    if (i + 1 < fx.moves.size()) {
      ASSERT_TRUE(r.body.contains("engine_reply"));
      EXPECT_EQ(r.body["engine_reply"]["edge"], fx.moves[i + 1].edge);
    }
  }
  const auto view = svc.get_game(id).body;
  EXPECT_EQ(view["status"], "WIN_BY_CYCLE");
  EXPECT_EQ(view["winner"], 2);
  EXPECT_EQ(view["moves"].size(), 10u);
  EXPECT_EQ(view["moves"][7]["player"], 2);
  EXPECT_EQ(view["moves"][7]["number"], 8);

  const auto replayed = svc.replayed(id);
  ASSERT_TRUE(replayed);
  EXPECT_EQ(view_of_state(*replayed)["edges"], view["edges"]);
  EXPECT_EQ(svc.play_move(id, move(0, "F")).status, 409);
}

TEST(GameService, IllegalMoveNamesSinkVertex) {
  GameService svc;
  const std::string id = svc.create_game({{"cycle", 4}}).body["id"];
  ASSERT_EQ(svc.play_move(id, {{"from", 0}, {"to", 1}}).status, 200);
  const auto r = svc.play_move(id, {{"from", 2}, {"to", 1}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["violation"]["kind"], "sink");
  EXPECT_EQ(r.body["violation"]["vertex"], 1);
  EXPECT_NE(r.body["error"].get<std::string>().find("sink at vertex 1"), std::string::npos);
  EXPECT_EQ(svc.play_move(id, {{"edge", 0}, {"direction", "Q"}}).status, 400);
  EXPECT_EQ(svc.play_move("deadbeef", move(0, "F")).status, 404);
}

TEST(GameService, CompletingMoveWinsForHuman) {
  GameService svc;
  const std::string id = svc.create_game({{"cycle", 3}}).body["id"];
  svc.play_move(id, {{"from", 0}, {"to", 1}});
  svc.play_move(id, {{"from", 1}, {"to", 2}});
  const auto r = svc.play_move(id, {{"from", 2}, {"to", 0}});
  EXPECT_EQ(r.body["status"], "WIN_BY_CYCLE");
  EXPECT_EQ(r.body["winner"], 1);
  EXPECT_EQ(r.body["cycle_cell"], 0);
}

TEST(GameService, ViewCarriesAnnotations) {
  GameService svc;
  const std::string id = svc.create_game({{"cycle", 5}}).body["id"];
  svc.play_move(id, {{"from", 0}, {"to", 1}});
  svc.play_move(id, {{"from", 1}, {"to", 2}});
  const auto v = svc.play_move(id, {{"from", 2}, {"to", 3}}).body;
  EXPECT_TRUE(v["edges"][3]["forward"]["death"].get<bool>());
  EXPECT_TRUE(v["vertices"][3]["almost_sink"].get<bool>());
}

TEST(GameService, Analysis) {
  GameService svc;
  const std::string c5 = svc.create_game({{"cycle", 5}}).body["id"];
  const auto a = svc.analysis(c5, 1'000'000);
  ASSERT_EQ(a.status, 200);
  EXPECT_EQ(a.body["winner_from_here"], 1);
  EXPECT_EQ(a.body["move_labels"].size(), 10u);
  EXPECT_FALSE(a.body["budget_exhausted"].get<bool>());

  const std::string c3 = svc.create_game({{"cycle", 3}}).body["id"];
  for (auto [f, t] : {std::pair{0, 1}, {1, 2}, {2, 0}}) svc.play_move(c3, {{"from", f}, {"to", t}});
  const auto done = svc.analysis(c3, 1000).body;
  EXPECT_EQ(done["status"], "WIN_BY_CYCLE");
  EXPECT_FALSE(done.contains("move_labels"));

  const std::string big = svc.create_game({{"board", fixture_board("c9_c5_c7_game.json")}}).body["id"];
  const auto tiny = svc.analysis(big, 10).body;
  EXPECT_TRUE(tiny["budget_exhausted"].get<bool>());
  EXPECT_FALSE(tiny.contains("winner_from_here"));
  EXPECT_EQ(tiny["axes"]["si_edges"].size(), 3u);
  EXPECT_EQ(svc.analysis("00", 10).status, 404);
}

TEST(GameService, SnapshotsReloadByReplay) {
  const auto dir = std::filesystem::temp_directory_path() / ("goc_snap_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::string id;
  json before;
  {
    GameService svc(dir.string());
    id = svc.create_game({{"board", fixture_board("c5_c7_game.json")}, {"engine", "mmr"}, {"engine_role", 2}}).body["id"];
    before = svc.play_move(id, {{"from", "B"}, {"to", "A"}}).body;
  }
  {
    std::ofstream junk(dir / "broken.json");
    junk << "{not json";
  }
  GameService again(dir.string());
  EXPECT_EQ(again.size(), 1u);
  auto after = again.get_game(id);
  ASSERT_EQ(after.status, 200);
  before.erase("engine_reply");
  EXPECT_EQ(after.body, before);
  // The reloaded engine keeps answering.
  const auto r = again.play_move(id, {{"from", "F"}, {"to", "G"}});
  EXPECT_EQ(r.status, 200);
  EXPECT_TRUE(r.body.contains("engine_reply"));
  std::filesystem::remove_all(dir);
}

TEST(Http, RoundTripOverLocalhost) {
  GameService svc;
  ServeOptions opts;
  opts.cors = true;
  httplib::Server srv;
  bind_routes(srv, svc, opts);
  const int port = srv.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto created = cli.Post("/api/games", R"({"gen":"cycle:5","engine":"perfect","engine_role":2})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  const std::string id = json::parse(created->body)["id"];
  auto moved = cli.Post("/api/games/" + id + "/moves", R"({"edge":0,"direction":"F"})", "application/json");
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->status, 200);
  EXPECT_TRUE(json::parse(moved->body).contains("engine_reply"));
  auto got = cli.Get("/api/games/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(json::parse(got->body)["moves"].size(), 2u);
  auto analysis = cli.Get("/api/games/" + id + "/analysis?budget=abc");
  ASSERT_TRUE(analysis);
  EXPECT_EQ(analysis->status, 400);
  auto bad = cli.Post("/api/games", "{oops", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto missing = cli.Get("/api/games/abcdef");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  srv.stop();
  t.join();
}
