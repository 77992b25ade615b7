#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "goc/rules.hpp"

namespace goc {

// Marks packed two bits per edge; boards up to 64 edges.
struct PackedMarks {
  std::array<std::uint64_t, 2> words{};
  bool operator==(const PackedMarks&) const = default;
};

inline constexpr int kMaxPackedEdges = 64;

inline PackedMarks pack(std::span<const Mark> marks) {
  if (marks.size() > kMaxPackedEdges)
    throw UnsupportedBoard("search supports at most 64 edges, board has " + std::to_string(marks.size()));
  PackedMarks p;
  for (std::size_t e = 0; e < marks.size(); ++e)
    p.words[e / 32] |= static_cast<std::uint64_t>(marks[e]) << (2 * (e % 32));
  return p;
}

struct PackedMarksHash {
  std::size_t operator()(const PackedMarks& p) const noexcept {
    std::uint64_t h = p.words[0] * 0x9E3779B97F4A7C15ULL;
    h ^= (p.words[1] + 0x632BE59BD9B4E019ULL) * 0xC2B2AE3D27D4EB4FULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h);
  }
};

inline constexpr std::uint64_t kDefaultBudget = 50'000'000;

struct SolveOptions {
  std::uint64_t budget = kDefaultBudget;  // node expansions
  bool memo = true;
  int threads = 1;
  // Root move generation order; only used to check order independence.
  bool reverse_move_order = false;
};

struct SolveResult {
  std::optional<Player> winner;  // absent iff budget_exhausted
  std::optional<Move> best_move;
  std::uint64_t nodes_expanded = 0;
  std::size_t table_size = 0;
  bool budget_exhausted = false;
};

namespace detail {

struct BudgetExhausted {};

// Win/loss table keyed on marks only; the mover is the parity of the mark count.
class MemoTable {
 public:
  virtual ~MemoTable() = default;
  virtual std::optional<bool> find(const PackedMarks& k) = 0;
  virtual void insert(const PackedMarks& k, bool wins) = 0;
  virtual std::size_t size() const = 0;
};

class LocalTable final : public MemoTable {
 public:
  std::optional<bool> find(const PackedMarks& k) override {
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void insert(const PackedMarks& k, bool wins) override { map_.emplace(k, wins); }
  std::size_t size() const override { return map_.size(); }

 private:
  std::unordered_map<PackedMarks, bool, PackedMarksHash> map_;
};

// Sharded map with insert-if-absent; shared by root-parallel workers.
class SharedTable final : public MemoTable {
 public:
  std::optional<bool> find(const PackedMarks& k) override {
    auto& s = shard(k);
    std::lock_guard lock(s.mu);
    auto it = s.map.find(k);
    if (it == s.map.end()) return std::nullopt;
    return it->second;
  }
  void insert(const PackedMarks& k, bool wins) override {
    auto& s = shard(k);
    std::lock_guard lock(s.mu);
    s.map.emplace(k, wins);
  }
  std::size_t size() const override {
    std::size_t n = 0;
    for (const auto& s : shards_) {
      std::lock_guard lock(s.mu);
      n += s.map.size();
    }
    return n;
  }

 private:
  struct Shard {
    mutable std::mutex mu;
    std::unordered_map<PackedMarks, bool, PackedMarksHash> map;
  };
  Shard& shard(const PackedMarks& k) { return shards_[PackedMarksHash{}(k) % shards_.size()]; }
  std::array<Shard, 64> shards_;
};

class Search {
 public:
  Search(const Board& board, MemoTable* table, std::atomic<std::uint64_t>& nodes, std::uint64_t budget, bool reverse)
      : board_(board), table_(table), nodes_(nodes), budget_(budget), reverse_(reverse) {}

  // Does the player to move at `marks` win with perfect play? The position
  // must not already contain a completed cycle.
  bool wins(kernel::Marks& marks) {
    if (nodes_.fetch_add(1, std::memory_order_relaxed) >= budget_) throw BudgetExhausted{};
    std::optional<PackedMarks> key;
    if (table_) {
      key = pack(marks);
      if (auto hit = table_->find(*key)) return *hit;
    }
    bool result = false;
    if (kernel::winning_completion(board_, marks)) {
      result = true;
    } else {
      std::vector<Move> moves;
      moves.reserve(2 * board_.edge_count());
      kernel::legal_moves(board_, marks, moves);
      if (reverse_) std::reverse(moves.begin(), moves.end());
      for (Move m : moves) {
        marks[m.edge] = to_mark(m.direction);
        const bool child = wins(marks);
        marks[m.edge] = Mark::Unmarked;
        if (!child) {
          result = true;
          break;
        }
      }
    }
    if (table_) table_->insert(*key, result);
    return result;
  }

 private:
  const Board& board_;
  MemoTable* table_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t budget_;
  bool reverse_;
};

}  // namespace detail

/// Perfect-play solver with a persistent transposition table.
///
/// Reusing one Solver across many queries on the same board shares the table,
/// which is what the PERFECT strategy and the analysis endpoint rely on.
class Solver {
 public:
  explicit Solver(BoardPtr board, SolveOptions opts = {}) : board_(std::move(board)), opts_(opts) {
    if (board_->edge_count() > kMaxPackedEdges && opts_.memo)
      throw UnsupportedBoard("solver supports at most 64 edges");
    if (opts_.memo) table_ = opts_.threads > 1 ? std::unique_ptr<detail::MemoTable>(new detail::SharedTable)
                                               : std::unique_ptr<detail::MemoTable>(new detail::LocalTable);
  }

  const SolveOptions& options() const { return opts_; }
  void set_budget(std::uint64_t budget) { opts_.budget = budget; }

  SolveResult solve(const GameState& state) { return solve_marks(state.marks()); }

  // Per-move WINNING (true) / LOSING (false) labels for the player to move.
  struct Labels {
    std::map<Move, bool> winning;
    std::uint64_t nodes = 0;
    bool budget_exhausted = false;
  };

  Labels label_moves(const GameState& state) {
    Labels out;
    kernel::Marks marks = state.marks();
    std::atomic<std::uint64_t> nodes{0};
    detail::Search search(*board_, table_.get(), nodes, opts_.budget, false);
    for (Move m : state.legal_moves()) {
      if (kernel::completes_cycle(*board_, marks, m)) {
        out.winning[m] = true;
        continue;
      }
      marks[m.edge] = to_mark(m.direction);
      try {
        out.winning[m] = !search.wins(marks);
      } catch (const detail::BudgetExhausted&) {
        out.budget_exhausted = true;
        marks[m.edge] = Mark::Unmarked;
        break;
      }
      marks[m.edge] = Mark::Unmarked;
    }
    out.nodes = nodes.load();
    return out;
  }

 private:
  SolveResult solve_marks(const kernel::Marks& start) {
    SolveResult r;
    kernel::Marks marks = start;
    const Player mover = kernel::marked_count(marks) % 2 == 0 ? Player::One : Player::Two;
    if (kernel::game_over(*board_, marks)) {
      r.winner = other(mover);
      r.table_size = table_ ? table_->size() : 0;
      return r;
    }
    std::vector<Move> moves;
    kernel::legal_moves(*board_, marks, moves);
    if (moves.empty()) {
      r.winner = other(mover);
      r.table_size = table_ ? table_->size() : 0;
      return r;
    }
    if (auto win = kernel::winning_completion(*board_, marks)) {
      r.winner = mover;
      r.best_move = win;
      r.nodes_expanded = 1;
      r.table_size = table_ ? table_->size() : 0;
      return r;
    }
    std::atomic<std::uint64_t> nodes{1};
    std::optional<Move> winning;
    bool exhausted = false;
    if (opts_.threads <= 1) {
      std::vector<Move> order = moves;
      if (opts_.reverse_move_order) std::reverse(order.begin(), order.end());
      detail::Search search(*board_, table_.get(), nodes, opts_.budget, opts_.reverse_move_order);
      try {
        for (Move m : order) {
          marks[m.edge] = to_mark(m.direction);
          const bool child = search.wins(marks);
          marks[m.edge] = Mark::Unmarked;
          if (!child && (!winning || m < *winning)) {
            winning = m;
            if (!opts_.reverse_move_order) break;
          }
        }
      } catch (const detail::BudgetExhausted&) {
        exhausted = true;
      }
    } else {
      // Root-parallel: each worker takes every k-th root move; all share the table.
      std::vector<std::optional<bool>> child_wins(moves.size());
      std::atomic<bool> out_of_budget{false};
      std::vector<std::jthread> workers;
      for (int t = 0; t < opts_.threads; ++t) {
        workers.emplace_back([&, t] {
          kernel::Marks local = start;
          detail::Search search(*board_, table_.get(), nodes, opts_.budget, false);
          for (std::size_t i = t; i < moves.size(); i += opts_.threads) {
            local[moves[i].edge] = to_mark(moves[i].direction);
            try {
              child_wins[i] = search.wins(local);
            } catch (const detail::BudgetExhausted&) {
              out_of_budget = true;
              return;
            }
            local[moves[i].edge] = Mark::Unmarked;
          }
        });
      }
      workers.clear();
      exhausted = out_of_budget.load();
      for (std::size_t i = 0; i < moves.size() && !exhausted; ++i)
        if (child_wins[i] && !*child_wins[i]) {
          winning = moves[i];
          break;
        }
    }
    r.nodes_expanded = nodes.load();
    r.table_size = table_ ? table_->size() : 0;
    if (exhausted) {
      r.budget_exhausted = true;
      return r;
    }
    r.winner = winning ? mover : other(mover);
    r.best_move = winning ? winning : std::optional<Move>(moves.front());
    return r;
  }

  BoardPtr board_;
  SolveOptions opts_;
  std::unique_ptr<detail::MemoTable> table_;
};

inline SolveResult solve_state(const GameState& state, SolveOptions opts = {}) {
  Solver solver(state.board_ptr(), opts);
  return solver.solve(state);
}

inline SolveResult solve_board(BoardPtr board, SolveOptions opts = {}) {
  GameState start(board);
  return solve_state(start, opts);
}

enum class MoveLabel { Winning, Losing };

struct OutcomeLabels {
  std::map<Move, MoveLabel> labels;
  std::uint64_t nodes = 0;
  bool budget_exhausted = false;
};

inline OutcomeLabels outcome_labels(const GameState& state, SolveOptions opts = {}) {
  if (state.outcome().finished()) throw std::logic_error("outcome_labels requires an ongoing position");
  Solver solver(state.board_ptr(), opts);
  auto raw = solver.label_moves(state);
  OutcomeLabels out;
  for (auto [m, w] : raw.winning) out.labels[m] = w ? MoveLabel::Winning : MoveLabel::Losing;
  out.nodes = raw.nodes;
  out.budget_exhausted = raw.budget_exhausted;
  return out;
}

}  // namespace goc
