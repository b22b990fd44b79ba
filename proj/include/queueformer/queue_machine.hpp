#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "queueformer/alphabet.hpp"
#include "queueformer/errors.hpp"
#include "queueformer/tape_machine.hpp"  // ResourceMeter

namespace qf {

// Queue size as a function of the input length: eval(n) = coeff_n * n + offset.
struct SizeExpr {
  std::int64_t coeff_n = 0;
  std::int64_t offset = 0;

  std::int64_t eval(std::int64_t n) const { return coeff_n * n + offset; }

  std::string str() const {
    std::string s;
    if (coeff_n == 1) s = "n";
    else if (coeff_n != 0) s = std::to_string(coeff_n) + "n";
    if (offset != 0 || s.empty()) {
      if (!s.empty() && offset > 0) s += "+";
      if (s.empty() || offset != 0) s += std::to_string(offset);
    }
    return s;
  }

  // Accepts "<c>", "n", "<a>n", "n+<c>", "<a>n+<c>", "n-<c>", ...
  static SizeExpr parse(const std::string& text) {
    SizeExpr e;
    std::size_t npos = text.find('n');
    try {
      if (npos == std::string::npos) {
        e.offset = std::stoll(text);
        return e;
      }
      std::string a = text.substr(0, npos);
      e.coeff_n = a.empty() ? 1 : std::stoll(a);
      std::string rest = text.substr(npos + 1);
      if (!rest.empty()) e.offset = std::stoll(rest);
    } catch (const std::exception&) {
      throw ValidationError("bad size expression '" + text + "'");
    }
    return e;
  }

  bool operator==(const SizeExpr&) const = default;
};

// One transition of a synchronous K-queue machine.
struct QueueAction {
  int next_state = 0;
  std::vector<Symbol> appends;  // size K
  bool operator==(const QueueAction&) const = default;
};

struct QueueTMSpec {
  int num_queues = 1;
  Alphabet alphabet = Alphabet::binary();
  std::vector<std::string> states;
  int start_state = 0;
  int halt_state = 0;
  int lookbehind = 1;  // 2 = delta also sees the previous popped symbols
  std::vector<SizeExpr> sizes;
  // Dense table over (state, popped[K] [, prev_popped[K] when lookbehind=2]).
  std::vector<std::optional<QueueAction>> delta;

  std::size_t delta_size() const {
    std::size_t n = states.size();
    int tuples = lookbehind == 2 ? 2 * num_queues : num_queues;
    for (int i = 0; i < tuples; ++i) n *= static_cast<std::size_t>(alphabet.size());
    return n;
  }

  std::size_t delta_index(int state, const std::vector<Symbol>& popped,
                          const std::vector<Symbol>& prev = {}) const {
    std::size_t idx = static_cast<std::size_t>(state);
    const std::size_t S = static_cast<std::size_t>(alphabet.size());
    for (int i = 0; i < num_queues; ++i)
      idx = idx * S + static_cast<std::size_t>(popped[static_cast<std::size_t>(i)]);
    if (lookbehind == 2)
      for (int i = 0; i < num_queues; ++i)
        idx = idx * S + static_cast<std::size_t>(prev[static_cast<std::size_t>(i)]);
    return idx;
  }

  void set_transition(int state, const std::vector<Symbol>& popped, QueueAction action,
                      const std::vector<Symbol>& prev = {}) {
    if (delta.size() != delta_size()) delta.assign(delta_size(), std::nullopt);
    delta[delta_index(state, popped, prev)] = std::move(action);
  }

  const QueueAction& transition(int state, const std::vector<Symbol>& popped,
                                const std::vector<Symbol>& prev = {}) const {
    const auto& slot = delta[delta_index(state, popped, prev)];
    if (!slot) throw ValidationError("missing transition from state '" + states[state] + "'");
    return *slot;
  }

  int state_id(const std::string& name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == name) return static_cast<int>(i);
    throw ValidationError("unknown state '" + name + "'");
  }

  bool operator==(const QueueTMSpec&) const = default;
};

// Returns the list of violations; empty iff well formed. Size evenness that
// depends on n is rechecked at instantiation time by qm_run.
inline std::vector<std::string> validate_spec(const QueueTMSpec& spec) {
  std::vector<std::string> out;
  if (spec.num_queues < 1) out.push_back("queue count must be >= 1");
  if (spec.states.empty()) out.push_back("no states");
  if (spec.start_state < 0 || spec.start_state >= static_cast<int>(spec.states.size()))
    out.push_back("missing q_start");
  if (spec.halt_state < 0 || spec.halt_state >= static_cast<int>(spec.states.size()))
    out.push_back("missing q_halt");
  if (spec.lookbehind != 1 && spec.lookbehind != 2) out.push_back("lookbehind must be 1 or 2");
  if (static_cast<int>(spec.sizes.size()) != spec.num_queues)
    out.push_back("size expression count != queue count");
  for (std::size_t r = 0; r < spec.sizes.size(); ++r) {
    const auto& e = spec.sizes[r];
    // Statically checkable case of the even-size requirement; n-dependent
    // sizes are rechecked at instantiation.
    if (e.coeff_n == 0 && (e.offset <= 0 || e.offset % 2 != 0))
      out.push_back("odd queue size: s_" + std::to_string(r) + " = " + e.str());
  }
  if (spec.delta.size() != spec.delta_size()) {
    out.push_back("partial transition table");
    return out;
  }
  for (std::size_t idx = 0; idx < spec.delta.size(); ++idx) {
    // Recover the state id of this slot to skip halt rows.
    std::size_t per_state = spec.delta_size() / spec.states.size();
    int q = static_cast<int>(idx / per_state);
    if (q == spec.halt_state) continue;
    if (!spec.delta[idx]) {
      out.push_back("partial transition table: state '" + spec.states[static_cast<std::size_t>(q)] + "'");
      if (out.size() > 40) return out;
    } else if (static_cast<int>(spec.delta[idx]->appends.size()) != spec.num_queues) {
      out.push_back("append arity mismatch in state '" + spec.states[static_cast<std::size_t>(q)] + "'");
    }
  }
  return out;
}

struct QueueConfig {
  int state = 0;
  std::vector<std::deque<Symbol>> queues;  // front = next pop
  std::vector<Symbol> prev_popped;         // valid when lookbehind = 2
  std::uint64_t step = 0;                  // absolute step counter (prompt steps included)
};

struct LogRecord {
  std::uint64_t step = 0;  // absolute, 1-indexed; steps 1..n are the prompt
  int state = 0;           // state right after this step's transition
  std::vector<Symbol> popped;
  std::vector<Symbol> appended;
  int parity = 0;  // step mod 2
  bool prompt = false;
};

// The execution log as in the analysis of the construction: records 1..n are
// the virtual prompt steps (append x_i to queue 0, blanks elsewhere), records
// n+1.. are real transitions.
struct ExecutionLog {
  std::uint64_t prompt_len = 0;
  int num_queues = 0;
  std::vector<std::int64_t> sizes;
  std::vector<LogRecord> records;

  std::size_t real_steps() const { return records.size() - static_cast<std::size_t>(prompt_len); }
  const LogRecord& record_at_step(std::uint64_t step) const {
    return records[static_cast<std::size_t>(step - 1)];
  }
};

// Pops the front of every queue, applies delta, appends exactly one symbol to
// every queue. Queue lengths are invariant.
inline LogRecord qm_step(const QueueTMSpec& spec, QueueConfig& cfg) {
  if (cfg.state == spec.halt_state)
    throw ProtocolViolation("qm_step on a halted configuration");
  const int K = spec.num_queues;
  std::vector<Symbol> popped(static_cast<std::size_t>(K));
  for (int r = 0; r < K; ++r) {
    auto& q = cfg.queues[static_cast<std::size_t>(r)];
    if (q.empty()) throw EmptyQueue(r);
    popped[static_cast<std::size_t>(r)] = q.front();
    q.pop_front();
  }
  const QueueAction& act = spec.lookbehind == 2
                               ? spec.transition(cfg.state, popped, cfg.prev_popped)
                               : spec.transition(cfg.state, popped);
  for (int r = 0; r < K; ++r)
    cfg.queues[static_cast<std::size_t>(r)].push_back(act.appends[static_cast<std::size_t>(r)]);
  cfg.state = act.next_state;
  cfg.prev_popped = popped;
  ++cfg.step;

  LogRecord rec;
  rec.step = cfg.step;
  rec.state = cfg.state;
  rec.popped = std::move(popped);
  rec.appended = act.appends;
  rec.parity = static_cast<int>(rec.step % 2);
  return rec;
}

struct QmRunOptions {
  std::uint64_t fuel = 1'000'000;  // bound on real transition steps
  bool require_halt = false;
};

struct QmRunResult {
  std::string output;  // queue 0 content at stop
  bool halted = false;
  ExecutionLog log;
  ResourceMeter meter;
  QueueConfig final_config;
};

// Initializes queue 0 with the input left-padded with blanks to s_0(n) (the
// padding blanks are popped first, matching the virtual-log convention),
// queues 1..K-1 with blanks, and runs until q_halt or fuel.
inline QmRunResult qm_run(const QueueTMSpec& spec, const std::string& input,
                          const QmRunOptions& options = {}) {
  {
    auto violations = validate_spec(spec);
    if (!violations.empty()) throw ValidationError("invalid queue machine: " + violations.front());
  }
  const auto n = static_cast<std::int64_t>(input.size());
  const int K = spec.num_queues;
  QmRunResult result;
  result.log.prompt_len = static_cast<std::uint64_t>(n);
  result.log.num_queues = K;
  for (int r = 0; r < K; ++r) {
    std::int64_t s = spec.sizes[static_cast<std::size_t>(r)].eval(n);
    if (s <= 0 || s % 2 != 0)
      throw ValidationError("odd queue size: s_" + std::to_string(r) + "(" + std::to_string(n) +
                            ") = " + std::to_string(s));
    result.log.sizes.push_back(s);
  }
  if (n > result.log.sizes[0])
    throw ValidationError("input longer than s_0(n) = " + std::to_string(result.log.sizes[0]));

  const Symbol blank = spec.alphabet.blank();
  std::vector<Symbol> bits = spec.alphabet.encode_bits(input);
  QueueConfig cfg;
  cfg.state = spec.start_state;
  cfg.queues.assign(static_cast<std::size_t>(K), {});
  cfg.prev_popped.assign(static_cast<std::size_t>(K), blank);
  cfg.step = static_cast<std::uint64_t>(n);
  for (int r = 0; r < K; ++r) {
    auto& q = cfg.queues[static_cast<std::size_t>(r)];
    std::int64_t s = result.log.sizes[static_cast<std::size_t>(r)];
    if (r == 0) {
      for (std::int64_t i = 0; i < s - n; ++i) q.push_back(blank);
      for (Symbol b : bits) q.push_back(b);
    } else {
      q.assign(static_cast<std::size_t>(s), blank);
    }
  }

  // Virtual prompt records: appended_0 = x_i, blanks elsewhere, state q_start.
  for (std::int64_t i = 1; i <= n; ++i) {
    LogRecord rec;
    rec.step = static_cast<std::uint64_t>(i);
    rec.state = spec.start_state;
    rec.popped.assign(static_cast<std::size_t>(K), blank);
    rec.appended.assign(static_cast<std::size_t>(K), blank);
    rec.appended[0] = bits[static_cast<std::size_t>(i - 1)];
    rec.parity = static_cast<int>(i % 2);
    rec.prompt = true;
    result.log.records.push_back(std::move(rec));
  }

  std::uint64_t real = 0;
  while (cfg.state != spec.halt_state) {
    if (real >= options.fuel) {
      if (options.require_halt) throw FuelExhausted(options.fuel);
      break;
    }
    result.log.records.push_back(qm_step(spec, cfg));
    ++real;
    // Synchrony: every queue length equals its initial length after each step.
    for (int r = 0; r < K; ++r)
      if (static_cast<std::int64_t>(cfg.queues[static_cast<std::size_t>(r)].size()) !=
          result.log.sizes[static_cast<std::size_t>(r)])
        throw ProtocolViolation("queue length changed at step " + std::to_string(cfg.step));
  }

  result.halted = (cfg.state == spec.halt_state);
  result.meter.steps = real;
  result.meter.space = 0;
  for (auto s : result.log.sizes) result.meter.space += static_cast<std::uint64_t>(s);
  for (Symbol s : cfg.queues[0]) result.output += spec.alphabet.name(s);
  result.final_config = std::move(cfg);
  return result;
}

// FIFO consistency over a whole log: the popped symbols of record i equal the
// appended symbols of record i - s_r(n) (or the initial fill / padding blanks
// when that index precedes the log).
inline std::vector<std::string> check_fifo_consistency(const QueueTMSpec& spec,
                                                       const ExecutionLog& log) {
  std::vector<std::string> out;
  const Symbol blank = spec.alphabet.blank();
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& rec = log.records[i];
    if (rec.prompt) continue;
    for (int r = 0; r < log.num_queues; ++r) {
      std::int64_t src = static_cast<std::int64_t>(rec.step) - log.sizes[static_cast<std::size_t>(r)];
      Symbol expect;
      if (src >= 1) {
        expect = log.record_at_step(static_cast<std::uint64_t>(src)).appended[static_cast<std::size_t>(r)];
      } else {
        expect = blank;  // left padding / initial blank fill
      }
      if (rec.popped[static_cast<std::size_t>(r)] != expect) {
        out.push_back("fifo violation at step " + std::to_string(rec.step) + " queue " +
                      std::to_string(r));
        if (out.size() > 20) return out;
      }
    }
  }
  return out;
}

}  // namespace qf
