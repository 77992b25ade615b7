#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "goc/board.hpp"
#include "goc/rules.hpp"
#include "goc/solver.hpp"
#include "goc/strategy.hpp"
#include "goc/symmetry.hpp"

namespace goc {

/// Parse a generator spec: "cycle:5", "cycle 5" or "cactus:{json}".
inline Board generate_board(const std::string& spec) {
  const auto sep = spec.find_first_of(": ");
  const std::string kind = spec.substr(0, sep);
  const std::string arg = sep == std::string::npos ? "" : spec.substr(sep + 1);
  if (kind == "cycle") {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(arg, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("cycle generator needs a length, got '" + arg + "'");
    }
    if (used != arg.size()) throw InvalidArgument("cycle generator needs a length, got '" + arg + "'");
    return make_cycle_board(n);
  }
  if (kind == "cactus") {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(arg);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidSpec(std::string("cactus spec is not valid JSON: ") + e.what());
    }
    return build_cactus(parse_cactus_spec(j));
  }
  throw InvalidArgument("unknown generator '" + kind + "' (expected cycle or cactus)");
}

struct ApiResult {
  int status = 200;
  nlohmann::json body;
};

inline ApiResult api_error(int status, const std::string& message, nlohmann::json extra = nlohmann::json::object()) {
  extra["error"] = message;
  return {status, std::move(extra)};
}

inline nlohmann::json view_of_state(const GameState& s) {
  using nlohmann::json;
  const Board& b = s.board();
  json edges = json::array();
  for (EdgeId e = 0; e < b.edge_count(); ++e) {
    const auto st = s.edge_status(e);
    json j = {{"id", e}, {"marked", st.marked}};
    if (st.marked) {
      j["direction"] = std::string(1, direction_code(s.mark(e) == Mark::Forward ? Direction::Forward : Direction::Backward));
    } else {
      auto dir = [](const DirectionStatus& d) {
        return json{{"legal", d.legal}, {"completes_cycle", d.completes_cycle}, {"death", d.death}};
      };
      j["forward"] = dir(st.forward);
      j["backward"] = dir(st.backward);
      j["markable"] = st.markable;
      j["unmarkable"] = st.unmarkable;
      j["currently_playable"] = st.currently_playable;
    }
    edges.push_back(std::move(j));
  }
  json vertices = json::array();
  for (VertexId v = 0; v < b.vertex_count(); ++v) {
    const auto st = s.vertex_status(v);
    vertices.push_back({{"id", v},
                        {"in", st.in_count},
                        {"out", st.out_count},
                        {"unmarked", st.unmarked_count},
                        {"almost_sink", st.is_almost_sink},
                        {"almost_source", st.is_almost_source}});
  }
  json log = json::array();
  for (std::size_t i = 0; i < s.history().size(); ++i) {
    const Move m = s.history()[i];
    log.push_back({{"number", i + 1},
                   {"player", i % 2 ? 2 : 1},
                   {"edge", m.edge},
                   {"direction", std::string(1, direction_code(m.direction))},
                   {"from", tail(b, m)},
                   {"to", head(b, m)}});
  }
  const Outcome o = s.outcome();
  json v = {{"board", serialize_board(b)}, {"edges", edges}, {"vertices", vertices}, {"moves", log},
            {"to_move", to_int(s.to_move())}, {"status", o.finished() ? outcome_name(o.kind) : "ONGOING"}};
  if (o.winner) v["winner"] = to_int(*o.winner);
  if (o.cycle_cell) v["cycle_cell"] = *o.cycle_cell;
  return v;
}

/// In-memory game sessions with optional engine opponents and JSON snapshots.
class GameService {
 public:
  explicit GameService(std::string data_dir = "") : data_dir_(std::move(data_dir)) {
    if (!data_dir_.empty()) {
      std::filesystem::create_directories(data_dir_);
      load_snapshots();
    }
  }

  ApiResult create_game(const nlohmann::json& req) {
    if (!req.is_object()) return api_error(400, "request body must be a JSON object");
    BoardPtr board;
    try {
      board = board_from_request(req);
    } catch (const std::exception& e) {
      return api_error(400, std::string("invalid board: ") + e.what());
    }
    auto sess = std::make_shared<Session>(board);
    sess->created_at = now_iso();
    try {
      configure_engine(*sess, req);
    } catch (const StrategyInapplicable& e) {
      return api_error(422, std::string("strategy inapplicable: ") + e.what(), {{"reason", e.what()}});
    } catch (const std::exception& e) {
      return api_error(400, e.what());
    }
    nlohmann::json reply;
    if (sess->engine && sess->engine_role == Player::One) reply = engine_turn(*sess);
    sess->id = fresh_id();
    {
      std::unique_lock lock(map_mu_);
      sessions_[sess->id] = sess;
    }
    save(*sess);
    auto body = view(*sess);
    if (!reply.is_null()) body["engine_reply"] = reply;
    return {201, body};
  }

  ApiResult get_game(const std::string& id) {
    auto sess = find(id);
    if (!sess) return api_error(404, "unknown game " + id);
    std::lock_guard lock(sess->mu);
    return {200, view(*sess)};
  }

  ApiResult play_move(const std::string& id, const nlohmann::json& req) {
    auto sess = find(id);
    if (!sess) return api_error(404, "unknown game " + id);
    std::lock_guard lock(sess->mu);
    if (sess->state.outcome().finished()) return api_error(409, "game is finished");
    if (sess->engine && sess->state.to_move() == sess->engine_role) return api_error(409, "not your turn");
    Move m;
    try {
      m = move_from_json(sess->state.board(), req);
    } catch (const std::exception& e) {
      return api_error(400, e.what());
    }
    if (m.edge < 0 || m.edge >= sess->state.board().edge_count()) return api_error(422, "unknown edge");
    try {
      sess->state.play(m);
    } catch (const RuleViolation& e) {
      const auto& v = e.violation();
      nlohmann::json vj = {{"kind", violation_kind_name(v.kind)}};
      if (v.vertex >= 0) vj["vertex"] = v.vertex, vj["vertex_name"] = sess->state.board().vertex_name(v.vertex);
      return api_error(422, describe(sess->state.board(), v), {{"violation", vj}});
    }
    nlohmann::json reply;
    if (sess->engine && !sess->state.outcome().finished()) reply = engine_turn(*sess);
    save(*sess);
    auto body = view(*sess);
    if (!reply.is_null()) body["engine_reply"] = reply;
    return {200, body};
  }

  ApiResult analysis(const std::string& id, std::uint64_t budget) {
    auto sess = find(id);
    if (!sess) return api_error(404, "unknown game " + id);
    GameState snapshot = [&] {
      std::lock_guard lock(sess->mu);
      return sess->state;
    }();
    const Outcome o = snapshot.outcome();
    nlohmann::json body = {{"status", o.finished() ? outcome_name(o.kind) : "ONGOING"}};
    try {
      if (auto axes = select_axis_set(snapshot.board())) body["axes"] = axis_set_to_json(*axes);
    } catch (const UnsupportedBoard&) {
    }
    if (o.finished()) {
      body["winner"] = to_int(*o.winner);
      body["nodes"] = 0;
      body["budget_exhausted"] = false;
      return {200, body};
    }
    if (snapshot.board().edge_count() > kMaxPackedEdges) return api_error(422, "analysis supports at most 64 edges");
    Solver solver(snapshot.board_ptr(), {.budget = budget});
    const auto r = solver.solve(snapshot);
    std::uint64_t nodes = r.nodes_expanded;
    bool exhausted = r.budget_exhausted;
    if (r.winner) body["winner_from_here"] = to_int(*r.winner);
    if (!exhausted) {
      const auto labels = solver.label_moves(snapshot);
      nodes += labels.nodes;
      exhausted = labels.budget_exhausted;
      if (!exhausted) {
        nlohmann::json ml = nlohmann::json::array();
        for (auto [m, win] : labels.winning)
          ml.push_back({{"edge", m.edge}, {"direction", std::string(1, direction_code(m.direction))},
                        {"label", win ? "WINNING" : "LOSING"}});
        body["move_labels"] = ml;
      }
    }
    body["nodes"] = nodes;
    body["budget_exhausted"] = exhausted;
    return {200, body};
  }

  std::size_t size() const {
    std::shared_lock lock(map_mu_);
    return sessions_.size();
  }

  // Board plus history, replayed; used to check stored views are reconstructible.
  std::optional<GameState> replayed(const std::string& id) {
    auto sess = find(id);
    if (!sess) return std::nullopt;
    std::lock_guard lock(sess->mu);
    return replay(sess->state.board_ptr(), sess->state.history());
  }

 private:
  struct Session {
    explicit Session(BoardPtr b) : state(std::move(b)) {}
    std::string id;
    GameState state;
    std::optional<StrategyKind> engine_kind;
    Player engine_role = Player::Two;
    std::optional<StrategySession> engine;
    nlohmann::json axes;  // explicit axes, if the request supplied them
    std::string created_at;
    std::mutex mu;
  };

  static const char* violation_kind_name(Violation::Kind k) {
    switch (k) {
      case Violation::Kind::AlreadyMarked: return "already_marked";
      case Violation::Kind::Sink: return "sink";
      case Violation::Kind::Source: return "source";
      case Violation::Kind::GameOver: return "game_over";
    }
    return "?";
  }

  static BoardPtr board_from_request(const nlohmann::json& req) {
    if (req.contains("board")) return std::make_shared<const Board>(parse_board(req["board"]));
    if (req.contains("gen")) return std::make_shared<const Board>(generate_board(req["gen"].get<std::string>()));
    if (req.contains("cactus")) return std::make_shared<const Board>(build_cactus(parse_cactus_spec(req["cactus"])));
    if (req.contains("cycle")) return std::make_shared<const Board>(make_cycle_board(req["cycle"].get<int>()));
    throw BoardError("", "expected one of board, gen, cactus or cycle");
  }

  static void configure_engine(Session& s, const nlohmann::json& req) {
    const std::string engine = req.contains("engine") && req["engine"].is_string() ? req["engine"].get<std::string>() : "none";
    if (engine == "none") return;
    s.engine_kind = parse_strategy_kind(engine);
    const int role = req.value("engine_role", 2);
    if (role != 1 && role != 2) throw InvalidArgument("engine_role must be 1 or 2");
    s.engine_role = role == 1 ? Player::One : Player::Two;
    StrategyOptions opts;
    if (req.contains("axes")) {
      s.axes = req["axes"];
      opts.axes = parse_axis_set(s.state.board(), s.axes);
    }
    s.engine = StrategySession::create(s.state.board_ptr(), *s.engine_kind, s.engine_role, opts);
  }

  // The engine answers; if its strategy breaks, it falls back to the lowest
  // legal move that is not a death move and reports the failure.
  static nlohmann::json engine_turn(Session& s) {
    nlohmann::json reply;
    Move m;
    try {
      m = s.engine->next_move(s.state);
    } catch (const StrategyFailure& f) {
      reply["engine_error"] = f.what();
      const auto moves = s.state.legal_moves();
      m = moves.front();
      for (Move c : moves)
        if (s.state.completes_cycle(c) || !s.state.is_death_move(c)) {
          m = c;
          break;
        }
    }
    s.state.play(m);
    reply["edge"] = m.edge;
    reply["direction"] = std::string(1, direction_code(m.direction));
    reply["from"] = tail(s.state.board(), m);
    reply["to"] = head(s.state.board(), m);
    return reply;
  }

  nlohmann::json view(const Session& s) const {
    auto v = view_of_state(s.state);
    v["id"] = s.id;
    v["engine"] = s.engine_kind ? strategy_name(*s.engine_kind) : "none";
    if (s.engine_kind) v["engine_role"] = to_int(s.engine_role);
    v["created_at"] = s.created_at;
    return v;
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(map_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::string fresh_id() {
    std::lock_guard lock(rng_mu_);
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()),
                  static_cast<unsigned long long>(rng_()));
    return buf;
  }

  static std::string now_iso() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
  }

  void save(const Session& s) const {
    if (data_dir_.empty()) return;
    nlohmann::json moves = nlohmann::json::array();
    for (Move m : s.state.history()) moves.push_back(move_to_json(m));
    nlohmann::json snap = {{"board", serialize_board(s.state.board())},
                           {"history", moves},
                           {"engine", s.engine_kind ? strategy_name(*s.engine_kind) : "none"},
                           {"engine_role", to_int(s.engine_role)},
                           {"created_at", s.created_at}};
    if (!s.axes.is_null()) snap["axes"] = s.axes;
    const auto path = std::filesystem::path(data_dir_) / (s.id + ".json");
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << snap.dump();
    }
    std::filesystem::rename(tmp, path);
  }

  void load_snapshots() {
    for (const auto& entry : std::filesystem::directory_iterator(data_dir_)) {
      if (entry.path().extension() != ".json") continue;
      try {
        std::ifstream in(entry.path());
        const auto snap = nlohmann::json::parse(in);
        auto sess = std::make_shared<Session>(std::make_shared<const Board>(parse_board(snap.at("board"))));
        sess->id = entry.path().stem().string();
        sess->created_at = snap.value("created_at", "");
        configure_engine(*sess, snap);
        for (const auto& m : snap.at("history")) sess->state.play(move_from_json(sess->state.board(), m));
        sessions_[sess->id] = sess;
      } catch (const std::exception& e) {
        std::cerr << "skipping snapshot " << entry.path() << ": " << e.what() << "\n";
      }
    }
  }

  std::string data_dir_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_{std::random_device{}() ^ (static_cast<std::uint64_t>(std::random_device{}()) << 32)};
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8737;
  bool cors = false;
  std::string static_dir;
  std::string data_dir;
  std::uint64_t default_analysis_budget = 5'000'000;
};

inline void bind_routes(httplib::Server& srv, GameService& svc, const ServeOptions& opts) {
  auto send = [cors = opts.cors](httplib::Response& res, const ApiResult& r) {
    res.status = r.status;
    if (cors) res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  auto body_json = [](const httplib::Request& req) -> std::optional<nlohmann::json> {
    try {
      return req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      return std::nullopt;
    }
  };
  srv.Post("/api/games", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    auto j = body_json(req);
    send(res, j ? svc.create_game(*j) : api_error(400, "body is not valid JSON"));
  });
  srv.Get(R"(/api/games/([0-9a-f]+))", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc.get_game(req.matches[1]));
  });
  srv.Post(R"(/api/games/([0-9a-f]+)/moves)", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    auto j = body_json(req);
    send(res, j ? svc.play_move(req.matches[1], *j) : api_error(400, "body is not valid JSON"));
  });
  srv.Get(R"(/api/games/([0-9a-f]+)/analysis)", [=, &svc](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t budget = opts.default_analysis_budget;
    if (req.has_param("budget")) {
      try {
        budget = std::stoull(req.get_param_value("budget"));
      } catch (const std::exception&) {
        return send(res, api_error(400, "budget must be a non-negative integer"));
      }
    }
    send(res, svc.analysis(req.matches[1], budget));
  });
  if (opts.cors) {
    srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
  if (!opts.static_dir.empty() && std::filesystem::is_directory(opts.static_dir)) srv.set_mount_point("/", opts.static_dir);
}

}  // namespace goc
