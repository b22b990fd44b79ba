#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "queueformer/errors.hpp"
#include "queueformer/leveled_stack.hpp"
#include "queueformer/tape_machine.hpp"

namespace qf {

struct BridgeStats {
  std::uint64_t tm_steps = 0;
  std::uint64_t init_steps = 0;            // clock spent ingesting the input
  std::uint64_t total_machine_steps = 0;   // final shared clock (init included)
  std::vector<std::uint64_t> per_step_costs;
  std::int64_t s_bound = 0;
  int levels = 0;

  std::uint64_t simulation_steps() const { return total_machine_steps - init_steps; }
};

struct BridgeRunOptions {
  std::uint64_t fuel = 1'000'000;
  bool require_halt = false;
  // Check all stack invariants and the tape reconstruction against a reference
  // interpreter after every TM step.
  bool audit = true;
};

struct BridgeRunResult {
  std::string output;
  bool halted = false;
  BridgeStats stats;
  std::vector<std::string> audit;  // invariant/reconstruction violations
};

// Tape-to-queue orchestration: each tape is realized as two leveled stacks
// (cells strictly left of the head, top nearest; cells at and right of the
// head, top = current cell), so a k-tape machine runs on 6*k*k' synchronous
// cyclic tapes. All stacks share one clock: while one stack executes an
// operation, the others rotate idly.
class TapeBridge {
 public:
  TapeBridge(TapeTMSpec spec, int levels, std::int64_t s_bound)
      : spec_(std::move(spec)), levels_(levels), s_bound_(s_bound) {
    auto violations = validate_spec(spec_);
    if (!violations.empty()) throw ValidationError("invalid tape machine: " + violations.front());
  }

  int queue_tape_count() const { return 6 * spec_.k * levels_; }
  const TapeTMSpec& spec() const { return spec_; }
  const std::vector<LeveledStack>& stacks() const { return stacks_; }

  BridgeRunResult run(const std::string& input, const BridgeRunOptions& options = {}) {
    BridgeRunResult result;
    result.stats.s_bound = s_bound_;
    result.stats.levels = levels_;
    reset();

    const Symbol blank = spec_.alphabet.blank();
    std::vector<Symbol> bits = spec_.alphabet.encode_bits(input);
    // Ingest: tape 0's right stack holds the input with x_0 on top; every
    // other tape gets one materialized blank as its current cell.
    for (auto it = bits.rbegin(); it != bits.rend(); ++it)
      op(right_of(0), [&](LeveledStack& s) { s.push(*it); });
    if (bits.empty()) op(right_of(0), [&](LeveledStack& s) { s.push(blank); });
    for (int t = 1; t < spec_.k; ++t)
      op(right_of(t), [&](LeveledStack& s) { s.push(blank); });
    result.stats.init_steps = clock_;

    // Reference interpreter for the audit.
    TapeConfig ref;
    ref.state = spec_.start_state;
    ref.tapes.assign(static_cast<std::size_t>(spec_.k), {});
    ref.heads.assign(static_cast<std::size_t>(spec_.k), 0);
    ref.tapes[0] = bits;

    int state = spec_.start_state;
    std::vector<Symbol> read(static_cast<std::size_t>(spec_.k), blank);
    while (state != spec_.halt_state) {
      if (result.stats.tm_steps >= options.fuel) {
        if (options.require_halt) throw FuelExhausted(options.fuel);
        break;
      }
      const std::uint64_t before = clock_;
      for (int t = 0; t < spec_.k; ++t) {
        Payload top = stacks_[right_of(t)].peek_top();
        read[static_cast<std::size_t>(t)] = top == kBottom ? blank : static_cast<Symbol>(top);
      }
      const TapeAction& act = spec_.transition(state, read);
      for (int t = 0; t < spec_.k; ++t) {
        const bool writable = t > 0;
        const Symbol written =
            writable ? act.writes[static_cast<std::size_t>(t - 1)] : read[static_cast<std::size_t>(t)];
        apply_move(t, act.moves[static_cast<std::size_t>(t)], written, writable, blank,
                   result.stats.tm_steps);
      }
      state = act.next_state;
      ++result.stats.tm_steps;
      result.stats.per_step_costs.push_back(clock_ - before);

      if (options.audit) {
        step_reference(ref, blank);
        audit_step(ref, blank, result.stats.tm_steps, result.audit);
      }
    }

    result.halted = (state == spec_.halt_state);
    result.stats.total_machine_steps = clock_;
    result.output = extract_output(blank);
    return result;
  }

  // Total allocated cells across all stacks (for the space bound audit).
  std::size_t total_cells() const {
    std::size_t n = 0;
    for (const auto& s : stacks_) n += s.total_cells();
    return n;
  }

 private:
  std::size_t left_of(int tape) const { return static_cast<std::size_t>(2 * tape); }
  std::size_t right_of(int tape) const { return static_cast<std::size_t>(2 * tape + 1); }

  void reset() {
    stacks_.clear();
    for (int t = 0; t < spec_.k; ++t) {
      stacks_.emplace_back(s_bound_, levels_);
      stacks_.emplace_back(s_bound_, levels_);
    }
    clock_ = 0;
  }

  // Runs one stack operation and keeps the other stacks' heads on the shared
  // clock with idle rotations.
  template <typename F>
  std::invoke_result_t<F, LeveledStack&> op(std::size_t stack, F&& f) {
    LeveledStack& s = stacks_[stack];
    const std::uint64_t before = s.meter().machine_steps;
    if constexpr (std::is_void_v<std::invoke_result_t<F, LeveledStack&>>) {
      f(s);
      sync_others(stack, s.meter().machine_steps - before);
    } else {
      auto v = f(s);
      sync_others(stack, s.meter().machine_steps - before);
      return v;
    }
  }

  void sync_others(std::size_t stack, std::uint64_t delta) {
    for (std::size_t i = 0; i < stacks_.size(); ++i)
      if (i != stack) stacks_[i].idle_steps(delta);
    clock_ += delta;
  }

  void apply_move(int t, Move move, Symbol written, bool writable, Symbol blank,
                  std::uint64_t tm_step) {
    switch (move) {
      case Move::Stay:
        if (writable) {
          op(right_of(t), [](LeveledStack& s) { return s.pop(); });
          op(right_of(t), [&](LeveledStack& s) { s.push(written); });
        }
        break;
      case Move::Right: {
        // The written current cell moves behind the head; the next cell to the
        // right becomes current, materialized as blank if never visited.
        op(left_of(t), [&](LeveledStack& s) { s.push(written); });
        op(right_of(t), [](LeveledStack& s) { return s.pop(); });
        if (stacks_[right_of(t)].size() == 1)
          op(right_of(t), [&](LeveledStack& s) { s.push(blank); });
        break;
      }
      case Move::Left: {
        if (stacks_[left_of(t)].size() == 1) throw HeadUnderflow(t, tm_step);
        if (writable) {
          op(right_of(t), [](LeveledStack& s) { return s.pop(); });
          op(right_of(t), [&](LeveledStack& s) { s.push(written); });
        }
        Payload v = op(left_of(t), [](LeveledStack& s) { return s.pop(); });
        op(right_of(t), [&](LeveledStack& s) { s.push(v); });
        break;
      }
    }
  }

  void step_reference(TapeConfig& ref, Symbol blank) {
    std::vector<Symbol> read(static_cast<std::size_t>(spec_.k));
    for (int t = 0; t < spec_.k; ++t)
      read[static_cast<std::size_t>(t)] =
          detail::tape_read(ref.tapes[static_cast<std::size_t>(t)], ref.heads[static_cast<std::size_t>(t)], blank);
    const TapeAction& act = spec_.transition(ref.state, read);
    for (int t = 1; t < spec_.k; ++t)
      detail::tape_write(ref.tapes[static_cast<std::size_t>(t)], ref.heads[static_cast<std::size_t>(t)],
                         act.writes[static_cast<std::size_t>(t - 1)], blank);
    for (int t = 0; t < spec_.k; ++t) {
      switch (act.moves[static_cast<std::size_t>(t)]) {
        case Move::Left: --ref.heads[static_cast<std::size_t>(t)]; break;
        case Move::Stay: break;
        case Move::Right: ++ref.heads[static_cast<std::size_t>(t)]; break;
      }
    }
    ref.state = act.next_state;
  }

  // Checks every stack's invariants and rebuilds each tape from its stack
  // pair, comparing with the reference interpreter.
  void audit_step(const TapeConfig& ref, Symbol blank, std::uint64_t tm_step,
                  std::vector<std::string>& out) const {
    for (int t = 0; t < spec_.k; ++t) {
      const LeveledStack& left = stacks_[left_of(t)];
      const LeveledStack& right = stacks_[right_of(t)];
      // Expected stack contents from the reference tape.
      std::vector<Payload> expect_left{kBottom};
      for (std::size_t c = 0; c < ref.heads[static_cast<std::size_t>(t)]; ++c)
        expect_left.push_back(detail::tape_read(ref.tapes[static_cast<std::size_t>(t)], c, blank));
      const std::size_t head = ref.heads[static_cast<std::size_t>(t)];
      const std::size_t above = right.size() - 1;  // cells at and right of the head
      std::vector<Payload> expect_right{kBottom};
      for (std::size_t j = 0; j < above; ++j)
        expect_right.push_back(
            detail::tape_read(ref.tapes[static_cast<std::size_t>(t)], head + above - 1 - j, blank));
      for (const auto& v : left.check_invariants(&expect_left))
        out.push_back("tm_step " + std::to_string(tm_step) + " tape " + std::to_string(t) +
                      " left: " + v);
      for (const auto& v : right.check_invariants(&expect_right))
        out.push_back("tm_step " + std::to_string(tm_step) + " tape " + std::to_string(t) +
                      " right: " + v);
      if (out.size() > 50) return;
    }
  }

  std::string extract_output(Symbol blank) const {
    // Output convention: designated tape from cell 0 to the first blank. The
    // tape is reverse(left contents) ++ right contents read top-down.
    const LeveledStack& left = stacks_[left_of(spec_.output_tape)];
    const LeveledStack& right = stacks_[right_of(spec_.output_tape)];
    std::vector<Payload> cells = left.content_view();   // bottom, cell0, cell1, ...
    std::vector<Payload> rview = right.content_view();  // bottom, far, ..., current
    for (std::size_t i = rview.size(); i > 1; --i) cells.push_back(rview[i - 1]);
    std::string out;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (cells[i] == kBottom || static_cast<Symbol>(cells[i]) == blank) break;
      out += spec_.alphabet.name(static_cast<Symbol>(cells[i]));
    }
    return out;
  }

  TapeTMSpec spec_;
  int levels_;
  std::int64_t s_bound_;
  std::vector<LeveledStack> stacks_;
  std::uint64_t clock_ = 0;
};

inline TapeBridge compile_tape_machine(TapeTMSpec spec, int levels, std::int64_t s_bound) {
  return TapeBridge(std::move(spec), levels, s_bound);
}

// --- transfer spacing audit ---------------------------------------------------

struct TransferGapViolation {
  std::size_t stack;
  int level;
  std::uint64_t op_a, op_b, gap, required;
};

// For every level i >= 2, consecutive PUSH(i)/POP(i) events on one stack must
// be at least |T'_{i-1}|/2 = b^(i-1) stack operations apart.
inline std::vector<TransferGapViolation> transfer_gap_audit(
    const std::vector<TransferEvent>& log, int base, int levels, std::size_t stack_id = 0) {
  std::vector<TransferGapViolation> out;
  for (int lvl = 2; lvl <= levels; ++lvl) {
    std::uint64_t required = 1;
    for (int i = 0; i < lvl - 1; ++i) required *= static_cast<std::uint64_t>(base);
    const TransferEvent* prev = nullptr;
    for (const auto& ev : log) {
      if (ev.level != lvl) continue;
      if (prev && ev.op_index - prev->op_index < required)
        out.push_back({stack_id, lvl, prev->op_index, ev.op_index, ev.op_index - prev->op_index,
                       required});
      prev = &ev;
    }
  }
  return out;
}

inline std::vector<TransferGapViolation> transfer_gap_audit(const LeveledStack& stack,
                                                            std::size_t stack_id = 0) {
  return transfer_gap_audit(stack.transfer_log(), stack.base(), stack.levels(), stack_id);
}

inline std::vector<TransferGapViolation> transfer_gap_audit(const TapeBridge& bridge) {
  std::vector<TransferGapViolation> out;
  for (std::size_t s = 0; s < bridge.stacks().size(); ++s) {
    auto part = transfer_gap_audit(bridge.stacks()[s], s);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// --- slowdown measurement ------------------------------------------------------

struct CostRow {
  std::int64_t s = 0;
  int k_prime = 0;
  std::uint64_t ops = 0;            // tm_steps for bridge rows, stack_ops for stack rows
  std::uint64_t machine_steps = 0;  // simulation steps (ingestion excluded)
  double ratio = 0.0;               // machine_steps / (ops * ceil(s^(1/k')))
};

inline std::uint64_t ceil_root(std::int64_t s, int k) {
  for (std::uint64_t b = 1;; ++b) {
    std::int64_t v = 1;
    bool ge = false;
    for (int i = 0; i < k; ++i) {
      v *= static_cast<std::int64_t>(b);
      if (v >= s) { ge = true; break; }
    }
    if (ge || v >= s) return b;
  }
}

// Largest-over-smallest ratio across rows; the empirical stand-in for the
// amortized bound compares this spread against a configurable factor.
inline double ratio_spread(const std::vector<CostRow>& rows) {
  double lo = 0, hi = 0;
  for (const auto& r : rows) {
    if (r.ratio <= 0) continue;
    if (lo == 0 || r.ratio < lo) lo = r.ratio;
    if (r.ratio > hi) hi = r.ratio;
  }
  return lo > 0 ? hi / lo : 0.0;
}

// Runs the machine on each input over the (s, k') grid and reports the
// per-TM-step slowdown ratios.
inline std::vector<CostRow> measure_slowdown(const TapeTMSpec& spec,
                                             const std::vector<std::string>& inputs,
                                             const std::vector<std::pair<std::int64_t, int>>& grid,
                                             std::uint64_t fuel = 1'000'000) {
  std::vector<CostRow> rows;
  for (const auto& [s, kp] : grid) {
    CostRow row;
    row.s = s;
    row.k_prime = kp;
    for (const auto& input : inputs) {
      TapeBridge bridge(spec, kp, s);
      BridgeRunOptions opt;
      opt.fuel = fuel;
      opt.audit = false;
      auto res = bridge.run(input, opt);
      row.ops += res.stats.tm_steps;
      row.machine_steps += res.stats.simulation_steps();
    }
    row.ratio = row.ops == 0
                    ? 0.0
                    : static_cast<double>(row.machine_steps) /
                          (static_cast<double>(row.ops) * static_cast<double>(ceil_root(s, kp)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qf
