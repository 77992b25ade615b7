#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "goc/goc.hpp"

#ifndef GOC_FIXTURES_DIR
#define GOC_FIXTURES_DIR "tests/fixtures"
#endif

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoardSource {
  std::string file;
  std::string gen;
};

goc::BoardPtr load_board(const BoardSource& src) {
  if (src.file.empty() == src.gen.empty()) throw UsageError("exactly one of --board or --gen is required");
  if (!src.gen.empty()) return goc::share(goc::generate_board(src.gen));
  std::ifstream in(src.file);
  if (!in) throw UsageError("--board: cannot open " + src.file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("--board: " + src.file + " is not valid JSON: " + e.what());
  }
  // Fixture files carry the board under "board".
  if (j.is_object() && j.contains("board") && !j.contains("vertices")) j = j["board"];
  return goc::share(goc::parse_board(j));
}

goc::Player parse_role(int role) {
  if (role != 1 && role != 2) throw UsageError("--role must be 1 or 2");
  return role == 1 ? goc::Player::One : goc::Player::Two;
}

void add_board_flags(CLI::App* cmd, BoardSource& src) {
  cmd->add_option("--board", src.file, "board JSON file (a fixture file also works)");
  cmd->add_option("--gen", src.gen, "generator spec: cycle:N or cactus:{json}");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game of Cycles engine: generators, solver, symmetry analysis, strategy verification and server"};
  app.require_subcommand(1);

  BoardSource src;
  std::uint64_t budget = goc::kDefaultBudget;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_path;
  app.add_option("--out", out_path, "write output here instead of stdout");

  auto* gen = app.add_subcommand("gen", "emit board JSON from `cycle N` or `cactus spec.json`");
  std::vector<std::string> gen_args;
  gen->add_option("args", gen_args, "cycle N | cactus FILE")->expected(0, 2);
  gen->add_option("--gen", src.gen, "generator spec: cycle:N or cactus:{json}");

  auto* solve = app.add_subcommand("solve", "winner and best move");
  add_board_flags(solve, src);
  solve->add_option("--budget", budget, "node budget");
  solve->add_option("--threads", threads, "solver threads")->check(CLI::PositiveNumber);
  bool labels = false;
  solve->add_flag("--labels", labels, "also label every legal first move");

  auto* sym = app.add_subcommand("symmetry", "involutions, axis set and SI parity");
  add_board_flags(sym, src);
  bool all_sets = false;
  sym->add_flag("--all", all_sets, "list every valid axis set");

  auto* verify = app.add_subcommand("verify", "run a named suite, `all`, or `strategy` on one board");
  std::string suite;
  verify->add_option("suite", suite, "suite name, all, or strategy")->required();
  add_board_flags(verify, src);
  verify->add_option("--budget", budget, "node budget per check");
  verify->add_option("--seed", seed, "seed for random playouts");
  std::uint64_t playouts = 100'000;
  verify->add_option("--playouts", playouts, "random playouts in the properties suite");
  std::string fixtures_dir = GOC_FIXTURES_DIR;
  verify->add_option("--fixtures", fixtures_dir, "fixture directory");
  std::string strategy = "mmr";
  int role = 1;
  std::string axes_file;
  std::optional<std::uint64_t> pairing_seed;
  std::optional<int> opening_edge;
  std::size_t max_counterexamples = 1;
  verify->add_option("--strategy", strategy, "perfect | mirror | mmr | triangle");
  verify->add_option("--role", role, "strategy player (1 or 2)");
  verify->add_option("--axes", axes_file, "axis-set JSON overriding automatic selection");
  verify->add_option("--pairing-seed", pairing_seed, "shuffle the SI pairing");
  verify->add_option("--opening-edge", opening_edge, "SI edge for the odd-parity opening move");
  verify->add_option("--counterexamples", max_counterexamples, "collect up to this many failure classes");
  verify->add_option("--threads", threads, "accepted for symmetry with solve; verification is single-threaded");

  auto* replay = app.add_subcommand("replay", "replay fixture files and check their expectations");
  std::vector<std::string> replay_files;
  replay->add_option("fixtures", replay_files, "fixture JSON files")->required();

  auto* serve = app.add_subcommand("serve", "HTTP API and static UI");
  goc::ServeOptions sopts;
  if (const char* env = std::getenv("GOC_DATA_DIR")) sopts.data_dir = env;
  serve->add_option("--host", sopts.host, "bind address");
  serve->add_option("--port", sopts.port, "port")->check(CLI::Range(1, 65535));
  serve->add_flag("--cors", sopts.cors, "allow cross-origin requests");
  serve->add_option("--static", sopts.static_dir, "directory of UI assets served at /");
  serve->add_option("--data-dir", sopts.data_dir, "snapshot directory (default $GOC_DATA_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ofstream out_file;
  if (!out_path.empty()) {
    out_file.open(out_path);
    if (!out_file) {
      std::cerr << "--out: cannot open " << out_path << "\n";
      return 2;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : out_file;

  try {
    if (*gen) {
      if (!gen_args.empty() && !src.gen.empty()) throw UsageError("gen: give either positional arguments or --gen");
      goc::Board b = [&] {
        if (!src.gen.empty()) return goc::generate_board(src.gen);
        if (gen_args.size() != 2) throw UsageError("gen: expected `cycle N` or `cactus FILE`");
        if (gen_args[0] == "cycle") return goc::generate_board("cycle:" + gen_args[1]);
        if (gen_args[0] == "cactus") {
          std::ifstream in(gen_args[1]);
          if (!in) throw UsageError("gen: cannot open " + gen_args[1]);
          std::stringstream ss;
          ss << in.rdbuf();
          return goc::generate_board("cactus:" + ss.str());
        }
        throw UsageError("gen: unknown generator '" + gen_args[0] + "'");
      }();
      out << goc::serialize_board(b).dump() << "\n";
      return 0;
    }

    if (*solve) {
      auto board = load_board(src);
      goc::Solver solver(board, {.budget = budget, .threads = threads});
      goc::GameState s(board);
      const auto r = solver.solve(s);
      nlohmann::json j = {{"board", goc::describe_board(*board)}, {"nodes", r.nodes_expanded},
                          {"budget_exhausted", r.budget_exhausted}};
      if (r.winner) j["winner"] = goc::to_int(*r.winner);
      if (r.best_move) j["best_move"] = goc::describe(*board, *r.best_move);
      if (labels && !r.budget_exhausted) {
        const auto l = solver.label_moves(s);
        for (auto [m, win] : l.winning) j["labels"][goc::describe(*board, m)] = win ? "WINNING" : "LOSING";
      }
      out << j.dump() << "\n";
      return r.budget_exhausted ? 1 : 0;
    }

    if (*sym) {
      auto board = load_board(src);
      nlohmann::json j = {{"board", goc::describe_board(*board)}};
      if (board->vertex_count() <= goc::kInvolutionVertexGuard) {
        const auto invs = goc::find_involutions(*board);
        j["involutions"] = nlohmann::json::array();
        for (const auto& inv : invs) j["involutions"].push_back(goc::involution_to_json(inv));
      } else {
        j["involutions"] = "skipped: more than " + std::to_string(goc::kInvolutionVertexGuard) + " vertices";
      }
      try {
        if (auto set = goc::select_axis_set(*board)) j["axis_set"] = goc::axis_set_to_json(*set);
        else j["axis_set"] = nullptr;
        if (all_sets) {
          j["all_axis_sets"] = nlohmann::json::array();
          for (const auto& s : goc::all_axis_sets(*board)) j["all_axis_sets"].push_back(goc::axis_set_to_json(s));
        }
      } catch (const goc::UnsupportedBoard& e) {
        j["axis_set"] = nullptr;
        j["axis_note"] = e.what();
      }
      out << j.dump() << "\n";
      return 0;
    }

    if (*verify) {
      bool all_proved = true;
      auto emit = [&](const goc::VerificationReport& r) {
        out << goc::report_to_json(r).dump() << std::endl;
        all_proved &= r.proved();
      };
      if (suite == "strategy") {
        auto board = load_board(src);
        goc::VerifyOptions opts{.budget = budget, .max_counterexamples = max_counterexamples};
        if (!axes_file.empty()) {
          std::ifstream in(axes_file);
          if (!in) throw UsageError("--axes: cannot open " + axes_file);
          opts.strategy.axes = goc::parse_axis_set(*board, nlohmann::json::parse(in));
        }
        opts.strategy.pairing_seed = pairing_seed;
        if (opening_edge) opts.strategy.opening_edge = *opening_edge;
        goc::StrategyKind kind;
        try {
          kind = goc::parse_strategy_kind(strategy);
        } catch (const std::exception& e) {
          throw UsageError(std::string("--strategy: ") + e.what());
        }
        emit(goc::verify_strategy(board, kind, parse_role(role), opts));
      } else {
        if (!src.file.empty() || !src.gen.empty()) throw UsageError("--board/--gen only apply to `verify strategy`");
        const auto names = goc::suite_names();
        if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
          throw UsageError("verify: unknown suite '" + suite + "'");
        goc::run_suite(suite, {.budget = budget, .seed = seed, .playouts = playouts, .fixtures_dir = fixtures_dir}, emit);
      }
      return all_proved ? 0 : 1;
    }

    if (*replay) {
      bool ok = true;
      for (const auto& path : replay_files) {
        auto f = goc::load_fixture(path);
        const auto r = goc::replay_fixture(f);
        out << goc::report_to_json(r).dump() << "\n";
        ok &= r.proved();
      }
      return ok ? 0 : 1;
    }

    if (*serve) {
      goc::GameService service(sopts.data_dir);
      httplib::Server srv;
      goc::bind_routes(srv, service, sopts);
      std::cerr << "listening on http://" << sopts.host << ":" << sopts.port << "\n";
      if (!srv.listen(sopts.host, sopts.port)) {
        std::cerr << "cannot bind " << sopts.host << ":" << sopts.port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const goc::BoardError& e) {
    std::cerr << "invalid board: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const goc::StrategyInapplicable& e) {
    std::cerr << "strategy inapplicable: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
