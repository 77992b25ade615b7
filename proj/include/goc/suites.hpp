#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "goc/verify.hpp"

namespace goc {

struct SuiteContext {
  std::uint64_t budget = kDefaultBudget;
  std::uint64_t seed = 1;
  std::uint64_t playouts = 100'000;
  std::string fixtures_dir;
};

inline std::vector<std::string> suite_names() {
  return {"cycle-parity", "unmarkable-parity", "two-cycle", "main", "failure", "triangle", "fixtures", "properties", "pairing"};
}

namespace detail {

inline Fixture suite_fixture(const SuiteContext& ctx, const std::string& name) {
  return load_fixture((std::filesystem::path(ctx.fixtures_dir) / name).string());
}

}  // namespace detail

/// Run one named suite (or "all"), calling `emit` for each report as it completes.
inline void run_suite(const std::string& name, const SuiteContext& ctx,
                      const std::function<void(const VerificationReport&)>& emit) {
  auto each = [&](const std::vector<VerificationReport>& rs) {
    for (const auto& r : rs) emit(r);
  };
  if (name == "all") {
    for (const auto& s : suite_names()) run_suite(s, ctx, emit);
  } else if (name == "cycle-parity") {
    each(check_cycle_parity(9, ctx.budget));
  } else if (name == "unmarkable-parity") {
    for (int n = 3; n <= 8; ++n) emit(check_unmarkable_parity(n));
  } else if (name == "two-cycle") {
    each(check_two_cycle_table(4, 7, 12, ctx.budget));
  } else if (name == "main") {
    emit(check_main_theorem(detail::suite_fixture(ctx, "c9_c5_c7_game.json").board, "main:odd-si", ctx.budget));
    emit(check_main_theorem(detail::suite_fixture(ctx, "c8_c5_c7_game.json").board, "main:even-si", ctx.budget));
    emit(check_main_theorem(detail::suite_fixture(ctx, "five_cycle_repaired.json").board, "main:five-cycle", ctx.budget));
  } else if (name == "failure") {
    emit(check_failure_reproduction(detail::suite_fixture(ctx, "four_cycle_failure.json"), ctx.budget));
  } else if (name == "triangle") {
    each(check_triangle_theorem(4, 8, ctx.budget));
  } else if (name == "fixtures") {
    std::vector<std::filesystem::path> paths;
    for (const auto& e : std::filesystem::directory_iterator(ctx.fixtures_dir))
      if (e.path().extension() == ".json") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
      auto f = load_fixture(p.string());
      f.name = p.stem().string();
      emit(replay_fixture(f));
    }
  } else if (name == "properties") {
    emit(check_random_playouts(ctx.playouts, ctx.seed));
    emit(check_memo_equivalence(10));
    emit(check_si_parity_invariance(8));
  } else if (name == "pairing") {
    emit(check_pairing_independence(detail::suite_fixture(ctx, "c9_c5_c7_game.json").board, Player::One, 10, ctx.budget,
                                    "pairing-independence:odd-si"));
    emit(check_pairing_independence(detail::suite_fixture(ctx, "c8_c5_c7_game.json").board, Player::Two, 10, ctx.budget,
                                    "pairing-independence:even-si"));
  } else {
    throw InvalidArgument("unknown suite '" + name + "'");
  }
}

}  // namespace goc
