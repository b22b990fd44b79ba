#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "queueformer/alphabet.hpp"
#include "queueformer/errors.hpp"

namespace qf {

enum class Move : std::uint8_t { Left, Stay, Right };

inline char move_char(Move m) { return m == Move::Left ? 'L' : (m == Move::Stay ? 'S' : 'R'); }

inline Move move_from_char(char c) {
  switch (c) {
    case 'L': return Move::Left;
    case 'S': return Move::Stay;
    case 'R': return Move::Right;
    default: throw ValidationError(std::string("bad move '") + c + "'");
  }
}

// One transition of a k-tape machine: next state, symbols written to the
// working tapes 1..k-1 (tape 0 is the read-only input tape), and k head moves.
struct TapeAction {
  int next_state = 0;
  std::vector<Symbol> writes;  // size k-1
  std::vector<Move> moves;     // size k
  bool operator==(const TapeAction&) const = default;
};

struct TapeTMSpec {
  int k = 1;
  Alphabet alphabet = Alphabet::binary();
  std::vector<std::string> states;  // ordered; indices are state ids
  int start_state = 0;
  int halt_state = 0;
  int output_tape = 0;
  // Dense transition table indexed by (state, symbol tuple); totality over
  // non-halt states is checkable by enumeration.
  std::vector<std::optional<TapeAction>> delta;

  std::size_t delta_size() const {
    std::size_t n = static_cast<std::size_t>(states.size());
    for (int i = 0; i < k; ++i) n *= static_cast<std::size_t>(alphabet.size());
    return n;
  }

  std::size_t delta_index(int state, const std::vector<Symbol>& syms) const {
    std::size_t idx = static_cast<std::size_t>(state);
    for (int i = 0; i < k; ++i) {
      idx = idx * static_cast<std::size_t>(alphabet.size()) + static_cast<std::size_t>(syms[i]);
    }
    return idx;
  }

  void set_transition(int state, const std::vector<Symbol>& read, TapeAction action) {
    if (delta.size() != delta_size()) delta.assign(delta_size(), std::nullopt);
    delta[delta_index(state, read)] = std::move(action);
  }

  const TapeAction& transition(int state, const std::vector<Symbol>& read) const {
    const auto& slot = delta[delta_index(state, read)];
    if (!slot) throw ValidationError("missing transition from state '" + states[state] + "'");
    return *slot;
  }

  int state_id(const std::string& name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == name) return static_cast<int>(i);
    throw ValidationError("unknown state '" + name + "'");
  }

  bool operator==(const TapeTMSpec&) const = default;
};

// Report-style validation: returns the list of violations, empty iff well formed.
inline std::vector<std::string> validate_spec(const TapeTMSpec& spec) {
  std::vector<std::string> out;
  if (spec.k < 1) out.push_back("tape count must be >= 1");
  if (spec.states.empty()) out.push_back("no states");
  if (spec.start_state < 0 || spec.start_state >= static_cast<int>(spec.states.size()))
    out.push_back("missing q_start");
  if (spec.halt_state < 0 || spec.halt_state >= static_cast<int>(spec.states.size()))
    out.push_back("missing q_halt");
  if (spec.output_tape < 0 || spec.output_tape >= spec.k)
    out.push_back("output tape out of range");
  if (spec.delta.size() != spec.delta_size()) {
    out.push_back("partial transition table");
    return out;
  }
  const int S = spec.alphabet.size();
  std::vector<Symbol> syms(static_cast<std::size_t>(spec.k), 0);
  for (int q = 0; q < static_cast<int>(spec.states.size()); ++q) {
    if (q == spec.halt_state) continue;
    // Enumerate all symbol tuples.
    std::fill(syms.begin(), syms.end(), 0);
    while (true) {
      const auto& slot = spec.delta[spec.delta_index(q, syms)];
      if (!slot) {
        out.push_back("partial transition table: no rule for state '" + spec.states[q] + "'");
      } else {
        if (static_cast<int>(slot->writes.size()) != spec.k - 1)
          out.push_back("transition from '" + spec.states[q] + "' writes wrong arity");
        if (static_cast<int>(slot->moves.size()) != spec.k)
          out.push_back("transition from '" + spec.states[q] + "' has wrong move arity");
      }
      if (!out.empty() && out.size() > 40) return out;  // cap noise
      int i = spec.k - 1;
      for (; i >= 0; --i) {
        if (++syms[static_cast<std::size_t>(i)] < S) break;
        syms[static_cast<std::size_t>(i)] = 0;
      }
      if (i < 0) break;
    }
  }
  return out;
}

struct TapeConfig {
  int state = 0;
  std::vector<std::vector<Symbol>> tapes;  // grow on demand; cells beyond extent read blank
  std::vector<std::size_t> heads;
};

struct ResourceMeter {
  std::uint64_t steps = 0;
  std::uint64_t space = 0;
};

struct TmRunOptions {
  std::uint64_t fuel = 1'000'000;
  bool initial_scan = true;   // the interpreter performs the left-to-right input scan
  bool record_trace = false;  // keep a per-step TapeConfig trace
  bool require_halt = false;  // throw FuelExhausted instead of returning halted=false
};

struct TapeRunResult {
  std::string output;
  bool halted = false;
  TapeConfig final_config;
  std::vector<TapeConfig> trace;
  ResourceMeter meter;
  std::uint64_t transition_steps = 0;  // delta applications (excludes the harness scan)
};

namespace detail {
inline Symbol tape_read(const std::vector<Symbol>& tape, std::size_t pos, Symbol blank) {
  return pos < tape.size() ? tape[pos] : blank;
}
inline void tape_write(std::vector<Symbol>& tape, std::size_t pos, Symbol s, Symbol blank) {
  if (pos >= tape.size()) tape.resize(pos + 1, blank);
  tape[pos] = s;
}
}  // namespace detail

// Runs spec from q_start with `input` on tape 0. Output is the designated
// output tape from cell 0 to the first blank.
inline TapeRunResult tm_run(const TapeTMSpec& spec, const std::string& input,
                            const TmRunOptions& options = {}) {
  {
    auto violations = validate_spec(spec);
    if (!violations.empty()) throw ValidationError("invalid tape machine: " + violations.front());
  }
  const Symbol blank = spec.alphabet.blank();
  TapeRunResult result;
  TapeConfig cfg;
  cfg.state = spec.start_state;
  cfg.tapes.assign(static_cast<std::size_t>(spec.k), {});
  cfg.heads.assign(static_cast<std::size_t>(spec.k), 0);
  cfg.tapes[0] = spec.alphabet.encode_bits(input);

  std::vector<std::size_t> max_head(static_cast<std::size_t>(spec.k), 0);
  auto note_head = [&](int t) {
    if (cfg.heads[static_cast<std::size_t>(t)] > max_head[static_cast<std::size_t>(t)])
      max_head[static_cast<std::size_t>(t)] = cfg.heads[static_cast<std::size_t>(t)];
  };

  if (options.initial_scan) {
    // The machine first scans the input tape: head 0 sweeps right to the
    // first blank and returns. State and tapes are untouched.
    while (detail::tape_read(cfg.tapes[0], cfg.heads[0], blank) != blank) {
      ++cfg.heads[0];
      note_head(0);
      ++result.meter.steps;
    }
    while (cfg.heads[0] > 0) {
      --cfg.heads[0];
      ++result.meter.steps;
    }
  }

  if (options.record_trace) result.trace.push_back(cfg);
  std::vector<Symbol> read(static_cast<std::size_t>(spec.k), blank);
  while (cfg.state != spec.halt_state) {
    if (result.meter.steps >= options.fuel) {
      if (options.require_halt) throw FuelExhausted(options.fuel);
      break;
    }
    for (int t = 0; t < spec.k; ++t)
      read[static_cast<std::size_t>(t)] =
          detail::tape_read(cfg.tapes[static_cast<std::size_t>(t)], cfg.heads[static_cast<std::size_t>(t)], blank);
    const TapeAction& act = spec.transition(cfg.state, read);
    for (int t = 1; t < spec.k; ++t)
      detail::tape_write(cfg.tapes[static_cast<std::size_t>(t)], cfg.heads[static_cast<std::size_t>(t)],
                         act.writes[static_cast<std::size_t>(t - 1)], blank);
    for (int t = 0; t < spec.k; ++t) {
      switch (act.moves[static_cast<std::size_t>(t)]) {
        case Move::Left:
          if (cfg.heads[static_cast<std::size_t>(t)] == 0) throw HeadUnderflow(t, result.meter.steps);
          --cfg.heads[static_cast<std::size_t>(t)];
          break;
        case Move::Stay:
          break;
        case Move::Right:
          ++cfg.heads[static_cast<std::size_t>(t)];
          note_head(t);
          break;
      }
    }
    cfg.state = act.next_state;
    ++result.meter.steps;
    ++result.transition_steps;
    if (options.record_trace) result.trace.push_back(cfg);
  }

  result.halted = (cfg.state == spec.halt_state);
  result.meter.space = 0;
  for (int t = 0; t < spec.k; ++t) result.meter.space += max_head[static_cast<std::size_t>(t)] + 1;
  const auto& out_tape = cfg.tapes[static_cast<std::size_t>(spec.output_tape)];
  for (Symbol s : out_tape) {
    if (s == blank) break;
    result.output += spec.alphabet.name(s);
  }
  result.final_config = std::move(cfg);
  return result;
}

}  // namespace qf
