#pragma once

#include <functional>
#include <string>
#include <vector>

#include "queueformer/queue_machine.hpp"
#include "queueformer/tape_machine.hpp"

// Built-in example machines used by the test suites and the CLI demos.
namespace qf::zoo {

namespace detail {

// Fills delta for every (state, symbol tuple) with rule(state, symbols).
inline void fill_tape_delta(TapeTMSpec& spec,
                            const std::function<TapeAction(int, const std::vector<Symbol>&)>& rule) {
  spec.delta.assign(spec.delta_size(), std::nullopt);
  const int S = spec.alphabet.size();
  std::vector<Symbol> syms(static_cast<std::size_t>(spec.k), 0);
  for (int q = 0; q < static_cast<int>(spec.states.size()); ++q) {
    if (q == spec.halt_state) continue;
    std::fill(syms.begin(), syms.end(), 0);
    while (true) {
      spec.set_transition(q, syms, rule(q, syms));
      int i = spec.k - 1;
      for (; i >= 0; --i) {
        if (++syms[static_cast<std::size_t>(i)] < S) break;
        syms[static_cast<std::size_t>(i)] = 0;
      }
      if (i < 0) break;
    }
  }
}

inline void fill_queue_delta(QueueTMSpec& spec,
                             const std::function<QueueAction(int, const std::vector<Symbol>&)>& rule) {
  spec.delta.assign(spec.delta_size(), std::nullopt);
  const int S = spec.alphabet.size();
  std::vector<Symbol> syms(static_cast<std::size_t>(spec.num_queues), 0);
  for (int q = 0; q < static_cast<int>(spec.states.size()); ++q) {
    if (q == spec.halt_state) continue;
    std::fill(syms.begin(), syms.end(), 0);
    while (true) {
      spec.set_transition(q, syms, rule(q, syms));
      int i = spec.num_queues - 1;
      for (; i >= 0; --i) {
        if (++syms[static_cast<std::size_t>(i)] < S) break;
        syms[static_cast<std::size_t>(i)] = 0;
      }
      if (i < 0) break;
    }
  }
}

}  // namespace detail

// --- tape machines ------------------------------------------------------------

// One tape: run right over the input, halt at the first blank.
inline TapeTMSpec mover() {
  TapeTMSpec spec;
  spec.k = 1;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "done"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.output_tape = 0;
  const Symbol blank = spec.alphabet.blank();
  detail::fill_tape_delta(spec, [&](int, const std::vector<Symbol>& s) {
    TapeAction a;
    a.writes = {};
    if (s[0] == blank) {
      a.next_state = 1;
      a.moves = {Move::Stay};
    } else {
      a.next_state = 0;
      a.moves = {Move::Right};
    }
    return a;
  });
  return spec;
}

// Two tapes: copy the input onto tape 1.
inline TapeTMSpec copy_machine() {
  TapeTMSpec spec;
  spec.k = 2;
  spec.alphabet = Alphabet::binary();
  spec.states = {"copy", "done"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.output_tape = 1;
  const Symbol blank = spec.alphabet.blank();
  detail::fill_tape_delta(spec, [&](int, const std::vector<Symbol>& s) {
    TapeAction a;
    if (s[0] == blank) {
      a.next_state = 1;
      a.writes = {s[1]};
      a.moves = {Move::Stay, Move::Stay};
    } else {
      a.next_state = 0;
      a.writes = {s[0]};
      a.moves = {Move::Right, Move::Right};
    }
    return a;
  });
  return spec;
}

// Two tapes: write one 1 on tape 1 per 1 in the input (unary count).
inline TapeTMSpec unary_counter() {
  TapeTMSpec spec;
  spec.k = 2;
  spec.alphabet = Alphabet::binary();
  spec.states = {"count", "done"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.output_tape = 1;
  const Symbol blank = spec.alphabet.blank();
  const Symbol one = spec.alphabet.one();
  detail::fill_tape_delta(spec, [&](int, const std::vector<Symbol>& s) {
    TapeAction a;
    if (s[0] == blank) {
      a.next_state = 1;
      a.writes = {s[1]};
      a.moves = {Move::Stay, Move::Stay};
    } else if (s[0] == one) {
      a.next_state = 0;
      a.writes = {one};
      a.moves = {Move::Right, Move::Right};
    } else {
      a.next_state = 0;
      a.writes = {s[1]};
      a.moves = {Move::Right, Move::Stay};
    }
    return a;
  });
  return spec;
}

// Three tapes: palindrome check. Tape 1 holds a marked copy (and the verdict
// cell), tape 2 the reversed copy; the input head never moves left of cell 0.
inline TapeTMSpec palindrome() {
  TapeTMSpec spec;
  spec.k = 3;
  spec.alphabet = Alphabet::from_names({"0", "1", "_", "M"});
  spec.states = {"mark", "copy", "rev", "rewind", "cmp", "acc", "rej", "done"};
  spec.start_state = 0;
  spec.halt_state = 7;
  spec.output_tape = 1;
  const Symbol blank = spec.alphabet.blank();
  const Symbol mk = spec.alphabet.symbol("M");
  const Symbol zero = spec.alphabet.zero();
  const Symbol one = spec.alphabet.one();
  const int MARK = 0, COPY = 1, REV = 2, REWIND = 3, CMP = 4, ACC = 5, REJ = 6, DONE = 7;
  detail::fill_tape_delta(spec, [&](int q, const std::vector<Symbol>& s) {
    TapeAction a;
    switch (q) {
      case MARK:
        a = {COPY, {mk, s[2]}, {Move::Stay, Move::Right, Move::Stay}};
        break;
      case COPY:
        if (s[0] != blank)
          a = {COPY, {s[0], s[2]}, {Move::Right, Move::Right, Move::Stay}};
        else
          a = {REV, {s[1], mk}, {Move::Stay, Move::Left, Move::Right}};
        break;
      case REV:
        if (s[1] != mk)
          a = {REV, {s[1], s[1]}, {Move::Stay, Move::Left, Move::Right}};
        else
          a = {REWIND, {mk, s[2]}, {Move::Stay, Move::Stay, Move::Left}};
        break;
      case REWIND:
        if (s[2] != mk)
          a = {REWIND, {s[1], s[2]}, {Move::Left, Move::Stay, Move::Left}};
        else
          a = {CMP, {s[1], s[2]}, {Move::Stay, Move::Stay, Move::Right}};
        break;
      case CMP:
        if (s[0] == blank)
          a = {ACC, {one, s[2]}, {Move::Stay, Move::Right, Move::Stay}};
        else if (s[2] == s[0])
          a = {CMP, {s[1], s[2]}, {Move::Right, Move::Stay, Move::Right}};
        else
          a = {REJ, {zero, s[2]}, {Move::Stay, Move::Right, Move::Stay}};
        break;
      case ACC:
      case REJ:
        a = {DONE, {blank, s[2]}, {Move::Stay, Move::Stay, Move::Stay}};
        break;
      default:
        a = {DONE, {s[1], s[2]}, {Move::Stay, Move::Stay, Move::Stay}};
        break;
    }
    return a;
  });
  return spec;
}

// Two tapes: `sweeps` full left-right passes over the input. Tape 1 carries a
// left-end marker so the heads never underflow. TM time is independent of the
// bridge's space parameter, which makes it the slowdown-measurement machine.
inline TapeTMSpec sweeper(int sweeps = 6) {
  TapeTMSpec spec;
  spec.k = 2;
  spec.alphabet = Alphabet::from_names({"0", "1", "_", "M"});
  spec.states = {"init"};
  for (int c = 0; c < sweeps; ++c) {
    spec.states.push_back("right" + std::to_string(c));
    spec.states.push_back("left" + std::to_string(c));
  }
  spec.states.push_back("done");
  spec.start_state = 0;
  spec.halt_state = static_cast<int>(spec.states.size()) - 1;
  spec.output_tape = 1;
  const Symbol blank = spec.alphabet.blank();
  const Symbol mk = spec.alphabet.symbol("M");
  auto right_id = [&](int c) { return 1 + 2 * c; };
  auto left_id = [&](int c) { return 2 + 2 * c; };
  detail::fill_tape_delta(spec, [&](int q, const std::vector<Symbol>& s) {
    TapeAction a;
    if (q == 0) {
      a = {right_id(0), {mk}, {Move::Stay, Move::Stay}};
      return a;
    }
    int c = (q - 1) / 2;
    bool rightward = (q - 1) % 2 == 0;
    if (rightward) {
      if (s[0] != blank)
        a = {right_id(c), {s[1]}, {Move::Right, Move::Right}};
      else
        a = {left_id(c), {s[1]}, {Move::Stay, Move::Stay}};
    } else {
      if (s[1] != mk)
        a = {left_id(c), {s[1]}, {Move::Left, Move::Left}};
      else if (c + 1 < sweeps)
        a = {right_id(c + 1), {mk}, {Move::Stay, Move::Stay}};
      else
        a = {spec.halt_state, {mk}, {Move::Stay, Move::Stay}};
    }
    return a;
  });
  return spec;
}

// --- synchronous queue machines -------------------------------------------------

// One queue of size n: recycle every popped symbol.
inline QueueTMSpec echo() {
  QueueTMSpec spec;
  spec.num_queues = 1;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "stop"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.sizes = {SizeExpr{1, 0}};
  detail::fill_queue_delta(spec, [&](int, const std::vector<Symbol>& s) {
    return QueueAction{0, {s[0]}};
  });
  return spec;
}

// Two queues of size n: exchange the popped symbols.
inline QueueTMSpec swap_machine() {
  QueueTMSpec spec;
  spec.num_queues = 2;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "stop"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.sizes = {SizeExpr{1, 0}, SizeExpr{1, 0}};
  detail::fill_queue_delta(spec, [&](int, const std::vector<Symbol>& s) {
    return QueueAction{0, {s[1], s[0]}};
  });
  return spec;
}

// One queue: recycle symbols, halt on the first popped 0.
inline QueueTMSpec halt_on_zero() {
  QueueTMSpec spec;
  spec.num_queues = 1;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "stop"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.sizes = {SizeExpr{1, 0}};
  const Symbol zero = spec.alphabet.zero();
  detail::fill_queue_delta(spec, [&](int, const std::vector<Symbol>& s) {
    return QueueAction{s[0] == zero ? 1 : 0, {s[0]}};
  });
  return spec;
}

// Two queues of size n: queue 0 holds an LSB-first binary number, queue 1
// carries one marker that returns every n steps; each marker arrival starts
// another +1 pass, carries ripple through the states.
inline QueueTMSpec binary_counter() {
  QueueTMSpec spec;
  spec.num_queues = 2;
  spec.alphabet = Alphabet::binary();
  spec.states = {"seed", "pass", "carry0", "carry1", "stop"};
  spec.start_state = 0;
  spec.halt_state = 4;
  spec.sizes = {SizeExpr{1, 0}, SizeExpr{1, 0}};
  const Symbol zero = spec.alphabet.zero();
  const Symbol one = spec.alphabet.one();
  const int SEED = 0, PASS = 1, C0 = 2, C1 = 3;
  detail::fill_queue_delta(spec, [&](int q, const std::vector<Symbol>& s) {
    const Symbol b = s[0];
    const Symbol m = s[1];
    const int bitval = b == one ? 1 : 0;  // blanks count as 0
    auto sum_action = [&](int carry_in) {
      int sum = bitval + carry_in;
      return QueueAction{sum >= 2 ? C1 : C0, {(sum % 2) ? one : zero, m}};
    };
    switch (q) {
      case SEED:
        // First real step: plant the marker on queue 1, pass the bit through.
        return QueueAction{PASS, {b, one}};
      case PASS:
        if (m == one) return sum_action(1);
        return QueueAction{PASS, {b, m}};
      case C0:
        if (m == one) return sum_action(1);  // new pass, new increment
        return QueueAction{C0, {b, m}};
      case C1:
      default:
        if (m == one) return sum_action(1);  // carry out of the word is dropped
        return sum_action(1);
    }
  });
  return spec;
}

// Four queues of size n: each step rotates the popped tuple by one position.
// Useful with a 2x2 head-layer factorization.
inline QueueTMSpec rotate4() {
  QueueTMSpec spec;
  spec.num_queues = 4;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "stop"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.sizes.assign(4, SizeExpr{1, 0});
  detail::fill_queue_delta(spec, [&](int, const std::vector<Symbol>& s) {
    return QueueAction{0, {s[1], s[2], s[3], s[0]}};
  });
  return spec;
}

// One queue, lookbehind 2: append the previously popped symbol (one-step
// delayed echo), exercising the two-most-recent-pops transition form.
inline QueueTMSpec delayed_echo() {
  QueueTMSpec spec;
  spec.num_queues = 1;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "stop"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.lookbehind = 2;
  spec.sizes = {SizeExpr{1, 0}};
  spec.delta.assign(spec.delta_size(), std::nullopt);
  for (Symbol cur = 0; cur < spec.alphabet.size(); ++cur)
    for (Symbol prev = 0; prev < spec.alphabet.size(); ++prev)
      spec.set_transition(0, {cur}, QueueAction{0, {prev}}, {prev});
  return spec;
}

}  // namespace qf::zoo
