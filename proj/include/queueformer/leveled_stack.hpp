#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "queueformer/errors.hpp"

namespace qf {

// Stack payloads. kDummy is the placeholder occupying unused content cells;
// kBottom is the distinguished bottom element that is never popped.
using Payload = std::int32_t;
inline constexpr Payload kDummy = -1;
inline constexpr Payload kBottom = -2;

// Marks are a property of the cell position, fixed at construction; payload
// writes never change them. Both covers the degenerate length-1 tape.
enum class Mark : std::uint8_t { None, Leftmost, Rightmost, Both };

struct Cell {
  Mark mark = Mark::None;
  Payload payload = kDummy;
};

// A fixed-length queue viewed as a tape whose head shifts one cell to the
// right cyclically at each synchronous step.
class CyclicTape {
 public:
  explicit CyclicTape(std::size_t length) : cells_(length) {
    cells_.front().mark = Mark::Leftmost;
    cells_.back().mark = length == 1 ? Mark::Both : Mark::Rightmost;
  }

  std::size_t length() const { return cells_.size(); }
  std::size_t head() const { return head_; }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  const Cell& at_head() const { return cells_[head_]; }

 private:
  friend class LeveledStack;
  std::vector<Cell> cells_;
  std::size_t head_ = 0;
};

enum class TransferKind : std::uint8_t { Push, Pop };

struct TransferEvent {
  std::uint64_t op_index;  // 0-based index of the stack op that triggered it
  TransferKind kind;
  int level;
};

struct CostMeter {
  std::uint64_t machine_steps = 0;  // synchronous steps; the only step counter
  std::uint64_t stack_ops = 0;      // completed push/pop operations
  std::uint64_t realign_passes = 0; // delay-line passes before full-level drains
  std::vector<std::uint64_t> level_pushes;  // PUSH(i) counts, index = level
  std::vector<std::uint64_t> level_pops;    // POP(i) counts
};

// A payload overwrite applied at a tape's head cell during one synchronous
// step. `behind` targets the cell one before the head: the delayed-append
// register mechanism, where the appended symbol lags the pop by one step.
struct TapeWrite {
  std::size_t tape;
  Payload value;
  bool behind = false;
};

// The geometric leveled stack: k' levels, level i holding two half tapes of
// length b^i and a buffer tape of length 2*b^i, b = ceil(s^(1/k')). All heads
// advance together, once per sync_step; every higher operation is a controller
// loop over sync_step.
class LeveledStack {
 public:
  LeveledStack(std::int64_t space_bound, int levels) : space_bound_(space_bound), k_(levels) {
    if (space_bound < 1) throw ValidationError("space bound must be >= 1");
    if (levels < 1) throw ValidationError("level count must be >= 1");
    base_ = smallest_root(space_bound, levels);
    std::uint64_t len = 1;
    for (int i = 1; i <= levels; ++i) {
      len *= static_cast<std::uint64_t>(base_);
      levels_.push_back(Level{static_cast<std::size_t>(len), 0, 0});
      tapes_.emplace_back(static_cast<std::size_t>(len));
      tapes_.emplace_back(static_cast<std::size_t>(len));
      tapes_.emplace_back(static_cast<std::size_t>(2 * len));
    }
    meter_.level_pushes.assign(static_cast<std::size_t>(levels) + 2, 0);
    meter_.level_pops.assign(static_cast<std::size_t>(levels) + 2, 0);
    // The bottom element sits in the leftmost cell of level 1's left half.
    tapes_[0].cells_[0].payload = kBottom;
    levels_[0].count = 1;
    total_ = 1;
  }

  // --- observers -----------------------------------------------------------

  int base() const { return base_; }
  int levels() const { return k_; }
  std::int64_t space_bound() const { return space_bound_; }
  const CostMeter& meter() const { return meter_; }
  const std::vector<TransferEvent>& transfer_log() const { return transfer_log_; }
  std::size_t size() const { return total_; }  // real symbols incl. bottom

  std::size_t total_cells() const {
    std::size_t n = 0;
    for (const auto& t : tapes_) n += t.length();
    return n;
  }

  std::size_t capacity() const {
    std::size_t n = 0;
    for (const auto& lv : levels_) n += 2 * lv.half_len;
    return n;
  }

  const CyclicTape& tape(std::size_t index) const { return tapes_[index]; }
  std::size_t tape_count() const { return tapes_.size(); }

  std::size_t level_count(int i) const { return level(i).count; }
  std::size_t level_origin(int i) const { return level(i).origin; }
  std::size_t level_half(int i) const { return level(i).half_len; }
  // Balanced: one half's worth of content sitting in a single physical half.
  bool level_balanced(int i) const {
    return level(i).count == level(i).half_len && level(i).origin % level(i).half_len == 0;
  }

  // Concatenated real contents of T'_k' ... T'_1, bottom first. Pure observer.
  std::vector<Payload> content_view() const {
    std::vector<Payload> out;
    out.reserve(total_);
    for (int i = k_; i >= 1; --i) {
      const Level& lv = level(i);
      for (std::size_t t = 0; t < lv.count; ++t)
        out.push_back(read_concat(i, (lv.origin + t) % (2 * lv.half_len)));
    }
    return out;
  }

  Payload peek_top() const {
    const Level& lv = level(1);
    if (lv.count == 0) throw ProtocolViolation("level 1 empty with content present");
    return read_concat(1, (lv.origin + lv.count - 1) % (2 * lv.half_len));
  }

  // --- the synchronous primitive -------------------------------------------

  // Applies the payload overwrites, then advances every head one cell
  // cyclically. This is the only primitive that moves heads or increments
  // machine_steps.
  void sync_step(std::span<const TapeWrite> writes) {
    for (const TapeWrite& w : writes) {
      CyclicTape& t = tapes_[w.tape];
      std::size_t pos = w.behind ? (t.head_ + t.length() - 1) % t.length() : t.head_;
      t.cells_[pos].payload = w.value;
    }
    for (auto& t : tapes_) t.head_ = (t.head_ + 1) % t.length();
    ++meter_.machine_steps;
  }

  void sync_step(std::initializer_list<TapeWrite> writes) {
    sync_step(std::span<const TapeWrite>(writes.begin(), writes.size()));
  }

  // Pure rotations, used by the bridge to keep sibling stacks on one clock.
  void idle_steps(std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) sync_step({});
  }

  // --- stack operations -----------------------------------------------------

  void push(Payload a) {
    if (a == kDummy) throw ValidationError("cannot push the dummy placeholder");
    op_index_ = meter_.stack_ops++;
    Level& l1 = level(1);
    const std::size_t period = 2 * l1.half_len;
    if (l1.count == period)
      throw ProtocolViolation("level 1 full at op boundary");  // cascades prevent this
    // Scan from the block start to the first dummy cell and replace it with a.
    std::size_t target = (l1.origin + l1.count) % period;
    rotate_to(period, target);
    sync_step({TapeWrite{half_tape(1, target), a}});
    ++l1.count;
    ++total_;
    if (l1.count == period) push_level(2);
  }

  Payload pop() {
    op_index_ = meter_.stack_ops++;
    if (total_ <= 1) throw BottomReached();
    Level& l1 = level(1);
    const std::size_t period = 2 * l1.half_len;
    if (l1.count == 0) throw ProtocolViolation("level 1 empty with content present");
    // Walk the block from its start; the one-cell register holds the previous
    // popped symbol, and each append lags the pop by one step (write-behind).
    rotate_to(period, l1.origin % period);
    Payload reg = read_concat(1, l1.origin);
    if (reg == kDummy) throw ProtocolViolation("block start holds a dummy");
    sync_step({});  // pop into the register, no append
    for (std::size_t x = 1;; ++x) {
      const std::size_t prev_cell = (l1.origin + x - 1) % period;
      if (x == l1.count) {
        // reg is the last non-dummy: remove it, appending a dummy behind.
        sync_step({TapeWrite{half_tape(1, prev_cell), kDummy, true}});
        --l1.count;
        --total_;
        if (l1.count == 0) {
          l1.origin = 0;
          pop_level(2);
        }
        return reg;
      }
      Payload cur = read_concat(1, (l1.origin + x) % period);
      sync_step({TapeWrite{half_tape(1, prev_cell), reg, true}});
      reg = cur;
    }
  }

  // PUSH(i): the deepest half of the full level i-1 moves into the first
  // dummy cells of level i; the shallow half stays, its role flipped (block
  // origin advances by one half length). Exposed for testing.
  void push_level(int i) {
    if (i > k_)
      throw CapacityExceeded("push would exceed capacity for s = " + std::to_string(space_bound_) +
                             ", k' = " + std::to_string(k_));
    Level& lo = level(i - 1);
    Level& up = level(i);
    const std::size_t hl = lo.half_len;
    if (lo.count != 2 * hl) throw ProtocolViolation("PUSH trigger requires a full level below");
    // A full block whose origin is off the half grid cannot be drained in one
    // pass (head phases are rigid); realign it first by delay-line rotation.
    if (lo.origin % hl != 0) realign_full_level(i - 1);
    meter_.level_pushes[static_cast<std::size_t>(i)]++;
    transfer_log_.push_back({op_index_, TransferKind::Push, i});

    const std::size_t up_period = 2 * up.half_len;
    const std::size_t dest = (up.origin + up.count) % up_period;
    rotate_to(up_period, dest);
    for (std::size_t t = 0; t < hl; ++t) {
      const std::size_t src_cell = (lo.origin + t) % (2 * hl);
      const std::size_t dst_cell = (dest + t) % up_period;
      Payload val = read_concat(i - 1, src_cell);
      sync_step({TapeWrite{half_tape(i, dst_cell), val}, TapeWrite{half_tape(i - 1, src_cell), kDummy}});
    }
    lo.origin = (lo.origin + hl) % (2 * hl);
    lo.count = hl;  // balanced
    up.count += hl;
    if (up.count == up_period) push_level(i + 1);
  }

  // POP(i): the last half-length of level i's content refills the left half of
  // the (empty) level i-1; the rest of level i streams through its buffer and
  // back, advancing the block origin by one lower half length.
  void pop_level(int i) {
    if (i > k_) return;  // nothing above: no-op refill
    Level& lo = level(i - 1);
    Level& up = level(i);
    if (lo.count != 0) throw ProtocolViolation("POP trigger requires an empty level below");
    lo.origin = 0;  // empty level: roles are conventional
    const std::size_t hl = lo.half_len;
    if (up.count > 0) {
      meter_.level_pops[static_cast<std::size_t>(i)]++;
      transfer_log_.push_back({op_index_, TransferKind::Pop, i});
      const std::size_t up_period = 2 * up.half_len;
      const std::size_t m = up.count;
      const std::size_t g = up.origin;
      const std::size_t lo_left = tape_index(i - 1, 0);
      const std::size_t buf = tape_index(i, 2);
      rotate_to(up_period, g);
      // Scan the block left to right, streaming every element into the lower
      // left half; a cell about to be overwritten is diverted to the buffer.
      for (std::size_t t = 0; t < m; ++t) {
        const std::size_t c = (g + t) % up_period;
        Payload val = read_concat(i, c);
        Payload displaced = tapes_[lo_left].at_head().payload;
        if (displaced != kDummy) {
          sync_step({TapeWrite{buf, displaced}, TapeWrite{lo_left, val},
                     TapeWrite{half_tape(i, c), kDummy}});
        } else {
          sync_step({TapeWrite{lo_left, val}, TapeWrite{half_tape(i, c), kDummy}});
        }
      }
      // Copy the buffer content back; it holds everything but the last half
      // length, shifted one lower half forward.
      rotate_to(up_period, (g + hl) % up_period);
      for (std::size_t q = hl; q < m; ++q) {
        const std::size_t c = (g + q) % up_period;
        Payload bval = tapes_[buf].at_head().payload;
        sync_step({TapeWrite{half_tape(i, c), bval}, TapeWrite{buf, kDummy}});
      }
      lo.count = hl;
      up.count = m - hl;
      up.origin = up.count == 0 ? 0 : (g + hl) % up_period;
    }
    if (up.count == 0) pop_level(i + 1);
  }

  // --- invariant checking ----------------------------------------------------

  // Verifies the structural properties (a)-(e). When `expected` is given,
  // property (e) additionally compares against that reference content.
  std::vector<std::string> check_invariants(const std::vector<Payload>* expected = nullptr) const {
    std::vector<std::string> out;
    // Synchrony: every head equals machine_steps mod length.
    for (std::size_t t = 0; t < tapes_.size(); ++t) {
      if (tapes_[t].head() != meter_.machine_steps % tapes_[t].length())
        out.push_back("sync: head of tape " + std::to_string(t) + " off clock");
      const auto& cells = tapes_[t].cells_;
      if (cells.front().mark != Mark::Leftmost && cells.front().mark != Mark::Both)
        out.push_back("mark: tape " + std::to_string(t) + " lost its leftmost mark");
      if (cells.back().mark != Mark::Rightmost && cells.back().mark != Mark::Both)
        out.push_back("mark: tape " + std::to_string(t) + " lost its rightmost mark");
    }
    std::size_t counted = 0;
    for (int i = 1; i <= k_; ++i) {
      const Level& lv = level(i);
      const std::size_t period = 2 * lv.half_len;
      counted += lv.count;
      // Layout: one cyclic block of real symbols, dummies elsewhere.
      for (std::size_t c = 0; c < period; ++c) {
        bool in_block = ((c + period - lv.origin) % period) < lv.count;
        bool real = read_concat(i, c) != kDummy;
        if (real != in_block) {
          out.push_back("(e) layout: level " + std::to_string(i) + " cell " + std::to_string(c));
          break;
        }
      }
      const CyclicTape& b = tapes_[tape_index(i, 2)];
      for (std::size_t c = 0; c < b.length(); ++c)
        if (b.cell(c).payload != kDummy) {
          out.push_back("buffer of level " + std::to_string(i) + " not empty at op boundary");
          break;
        }
      if (i >= 2) {
        const std::size_t grain = level(i - 1).half_len;
        if (lv.count % grain != 0)
          out.push_back("(a) level " + std::to_string(i) + " count not a multiple of " +
                        std::to_string(grain));
        if (lv.origin % grain != 0)
          out.push_back("(b) level " + std::to_string(i) + " origin off the transfer grid");
      } else {
        if (lv.origin % lv.half_len != 0)
          out.push_back("(b) level 1 origin must sit on a half boundary");
      }
      if (lv.count == period && total_ > 1)
        out.push_back("(c) level " + std::to_string(i) + " full at an op boundary");
    }
    if (counted != total_) out.push_back("content count mismatch");
    // (d) empty levels have nothing above them.
    for (int i = 1; i < k_; ++i)
      if (level(i).count == 0 && level(i + 1).count != 0)
        out.push_back("(d) level " + std::to_string(i) + " empty below a nonempty level");
    auto content = content_view();
    if (content.empty() || content.front() != kBottom)
      out.push_back("(e) bottom element missing");
    if (expected && content != *expected) out.push_back("(e) content differs from reference");
    return out;
  }

  // Test hook: overwrite one payload in place (bypasses sync_step on purpose).
  void corrupt_cell(std::size_t tape, std::size_t cell, Payload value) {
    tapes_[tape].cells_[cell].payload = value;
  }

 private:
  struct Level {
    std::size_t half_len;  // b^i
    std::size_t origin;    // concat index of the deepest real cell
    std::size_t count;     // number of real symbols
  };

  static int smallest_root(std::int64_t s, int k) {
    // smallest b >= 1 with b^k >= s
    for (int b = 1;; ++b) {
      std::int64_t v = 1;
      bool over = false;
      for (int i = 0; i < k; ++i) {
        v *= b;
        if (v >= s) { over = true; break; }
      }
      if (over || v >= s) return b;
    }
  }

  Level& level(int i) { return levels_[static_cast<std::size_t>(i - 1)]; }
  const Level& level(int i) const { return levels_[static_cast<std::size_t>(i - 1)]; }

  std::size_t tape_index(int level_1based, int which) const {
    return static_cast<std::size_t>(3 * (level_1based - 1) + which);
  }

  // Tape holding the concatenated-content cell `c` of level i.
  std::size_t half_tape(int i, std::size_t c) const {
    return tape_index(i, c < level(i).half_len ? 0 : 1);
  }

  Payload read_concat(int i, std::size_t c) const {
    const Level& lv = level(i);
    const CyclicTape& t = tapes_[half_tape(i, c)];
    return t.cell(c % lv.half_len).payload;
  }

  // Rotate until machine_steps ≡ target (mod period).
  void rotate_to(std::size_t period, std::size_t target) {
    while (meter_.machine_steps % period != target % period) sync_step({});
  }

  // Rotates the full level j's content forward by delay-line passes until its
  // block origin sits on the half grid. A pass streams all cells through an
  // empty tape of length L, shifting the block by L; passes go through the
  // level-below buffer (2*b^(j-1)) and the empty physical half of level 1 (b).
  void realign_full_level(int j) {
    Level& lv = level(j);
    const std::size_t hl = lv.half_len;
    std::size_t delta = (hl - lv.origin % hl) % hl;  // forward shift needed mod hl
    while (delta != 0) {
      const std::size_t big = 2 * level(j - 1).half_len;  // buffer of level j-1
      const std::size_t small = level(1).half_len;        // empty half of level 1
      std::size_t shift;
      std::size_t tape;
      if (delta >= big) {
        shift = big;
        tape = tape_index(j - 1, 2);
      } else {
        shift = small;
        // Level 1 is balanced during a push cascade; its block occupies one
        // physical half, the other half is fully dummy.
        tape = tape_index(1, level(1).origin == 0 ? 1 : 0);
      }
      delay_pass(j, tape, shift);
      delta = (delta + hl - shift % hl) % hl;
    }
  }

  // One full-circle streaming pass of level j through the empty tape `delay`
  // of length L: every cell moves L positions forward; the delay tape ends
  // empty and the block origin advances by L.
  void delay_pass(int j, std::size_t delay, std::size_t L) {
    ++meter_.realign_passes;
    Level& lv = level(j);
    const std::size_t period = 2 * lv.half_len;
    const std::size_t g = lv.origin;
    for (std::size_t c = 0; c < L; ++c)
      if (tapes_[delay].cell(c).payload != kDummy)
        throw ProtocolViolation("delay tape not empty for realignment");
    rotate_to(period, g);
    for (std::size_t t = 0; t < period; ++t) {
      const std::size_t c = (g + t) % period;
      Payload val = read_concat(j, c);
      Payload displaced = tapes_[delay].at_head().payload;
      sync_step({TapeWrite{delay, val}, TapeWrite{half_tape(j, c), displaced}});
    }
    for (std::size_t t = 0; t < L; ++t) {
      const std::size_t c = (g + t) % period;
      Payload displaced = tapes_[delay].at_head().payload;
      sync_step({TapeWrite{delay, kDummy}, TapeWrite{half_tape(j, c), displaced}});
    }
    lv.origin = (g + L) % period;
  }

  std::int64_t space_bound_;
  int k_;
  int base_ = 1;
  std::vector<Level> levels_;
  std::vector<CyclicTape> tapes_;
  CostMeter meter_;
  std::vector<TransferEvent> transfer_log_;
  std::size_t total_ = 0;
  std::uint64_t op_index_ = 0;
};

// Convenience factory matching the operation name in the docs.
inline LeveledStack new_leveled_stack(std::int64_t space_bound, int levels) {
  return LeveledStack(space_bound, levels);
}

}  // namespace qf
