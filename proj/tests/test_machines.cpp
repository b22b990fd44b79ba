#include <doctest.h>

#include <set>

#include "queueformer/queue_machine.hpp"
#include "queueformer/tape_machine.hpp"
#include "queueformer/zoo.hpp"

using namespace qf;

TEST_CASE("validate_spec accepts well-formed machines and names violations") {
  auto copy = zoo::copy_machine();
  CHECK(validate_spec(copy).empty());

  auto echo = zoo::echo();
  CHECK(validate_spec(echo).empty());

  SUBCASE("odd constant queue size") {
    echo.sizes = {SizeExpr{0, 3}};
    auto v = validate_spec(echo);
    REQUIRE(!v.empty());
    CHECK(v.front().find("odd queue size") != std::string::npos);
  }
  SUBCASE("partial transition table") {
    copy.delta[copy.delta_index(0, {copy.alphabet.zero(), copy.alphabet.zero()})].reset();
    auto v = validate_spec(copy);
    REQUIRE(!v.empty());
    CHECK(v.front().find("partial transition table") != std::string::npos);
  }
  SUBCASE("missing halt state") {
    echo.halt_state = 7;
    auto v = validate_spec(echo);
    REQUIRE(!v.empty());
    CHECK(v.front().find("q_halt") != std::string::npos);
  }
}

TEST_CASE("tm_run: mover hand trace") {
  // Hand trace on "101" without the harness scan: three Right moves reading
  // 1,0,1, then the halting transition on the blank at cell 3.
  auto spec = zoo::mover();
  TmRunOptions opt;
  opt.initial_scan = false;
  auto res = tm_run(spec, "101", opt);
  CHECK(res.halted);
  CHECK(res.meter.steps == 4);
  CHECK(res.meter.space == 4);
  CHECK(res.output == "101");  // tape 0 is the designated output tape

  SUBCASE("the harness scan adds 2n steps and leaves the run unchanged") {
    TmRunOptions with_scan;
    auto res2 = tm_run(spec, "101", with_scan);
    CHECK(res2.output == res.output);
    CHECK(res2.meter.steps == res.meter.steps + 6);
    CHECK(res2.meter.space == 4);
  }
}

TEST_CASE("tm_run: copy machine reproduces its input") {
  auto spec = zoo::copy_machine();
  for (const std::string input : {"0110", "", "1", "0000", "101101"}) {
    auto res = tm_run(spec, input, {});
    CHECK(res.halted);
    CHECK(res.output == input);
  }
}

TEST_CASE("tm_run: immediate halt") {
  TapeTMSpec spec;
  spec.k = 2;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "done"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.output_tape = 1;
  zoo::detail::fill_tape_delta(spec, [&](int, const std::vector<Symbol>& s) {
    return TapeAction{1, {s[1]}, {Move::Stay, Move::Stay}};
  });
  TmRunOptions opt;
  opt.initial_scan = false;
  auto res = tm_run(spec, "11", opt);
  CHECK(res.halted);
  CHECK(res.meter.steps == 1);
  CHECK(res.meter.space <= 2);
}

TEST_CASE("tm_run: head underflow is a spec bug, not a crash") {
  TapeTMSpec spec;
  spec.k = 1;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "done"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.output_tape = 0;
  zoo::detail::fill_tape_delta(spec, [&](int, const std::vector<Symbol>&) {
    return TapeAction{0, {}, {Move::Left}};
  });
  TmRunOptions opt;
  opt.initial_scan = false;
  CHECK_THROWS_AS(tm_run(spec, "1", opt), HeadUnderflow);
}

TEST_CASE("tm_run: fuel bound") {
  TapeTMSpec spec;
  spec.k = 1;
  spec.alphabet = Alphabet::binary();
  spec.states = {"go", "done"};
  spec.start_state = 0;
  spec.halt_state = 1;
  spec.output_tape = 0;
  zoo::detail::fill_tape_delta(spec, [&](int, const std::vector<Symbol>&) {
    return TapeAction{0, {}, {Move::Right}};
  });
  TmRunOptions opt;
  opt.initial_scan = false;
  opt.fuel = 100;
  auto res = tm_run(spec, "1", opt);
  CHECK(!res.halted);
  CHECK(res.meter.steps == 100);
  opt.require_halt = true;
  CHECK_THROWS_AS(tm_run(spec, "1", opt), FuelExhausted);
}

TEST_CASE("tm meter space equals brute-force count of touched cells") {
  auto spec = zoo::palindrome();
  TmRunOptions opt;
  opt.initial_scan = false;
  opt.record_trace = true;
  auto res = tm_run(spec, "10101", opt);
  REQUIRE(res.halted);
  std::uint64_t touched = 0;
  for (int t = 0; t < spec.k; ++t) {
    std::set<std::size_t> cells;
    for (const auto& cfg : res.trace) cells.insert(cfg.heads[static_cast<std::size_t>(t)]);
    touched += cells.size();
  }
  CHECK(res.meter.space == touched);
}

TEST_CASE("qm_step: echo rotates the queue") {
  auto spec = zoo::echo();
  QueueConfig cfg;
  cfg.state = 0;
  cfg.queues = {{spec.alphabet.zero(), spec.alphabet.one()}};
  cfg.prev_popped = {spec.alphabet.blank()};
  auto rec = qm_step(spec, cfg);
  CHECK(rec.popped == std::vector<Symbol>{spec.alphabet.zero()});
  CHECK(rec.appended == std::vector<Symbol>{spec.alphabet.zero()});
  CHECK(cfg.queues[0].front() == spec.alphabet.one());
  CHECK(cfg.queues[0].back() == spec.alphabet.zero());
}

TEST_CASE("qm_step: swap exchanges queue fronts") {
  auto spec = zoo::swap_machine();
  QueueConfig cfg;
  cfg.state = 0;
  cfg.queues = {{spec.alphabet.zero()}, {spec.alphabet.one()}};
  cfg.prev_popped = {spec.alphabet.blank(), spec.alphabet.blank()};
  qm_step(spec, cfg);
  CHECK(cfg.queues[0].front() == spec.alphabet.one());
  CHECK(cfg.queues[1].front() == spec.alphabet.zero());
}

TEST_CASE("qm_step: stepping a halted configuration is rejected") {
  auto spec = zoo::halt_on_zero();
  QueueConfig cfg;
  cfg.state = spec.halt_state;
  cfg.queues = {{spec.alphabet.one()}};
  cfg.prev_popped = {spec.alphabet.blank()};
  CHECK_THROWS_AS(qm_step(spec, cfg), ProtocolViolation);
}

TEST_CASE("qm_step: empty queue is rejected") {
  auto spec = zoo::echo();
  QueueConfig cfg;
  cfg.state = 0;
  cfg.queues = {{}};
  cfg.prev_popped = {spec.alphabet.blank()};
  CHECK_THROWS_AS(qm_step(spec, cfg), EmptyQueue);
}

TEST_CASE("qm_step: lookbehind 2 appends the previous pop") {
  auto spec = zoo::delayed_echo();
  QueueConfig cfg;
  cfg.state = 0;
  cfg.queues = {{spec.alphabet.one(), spec.alphabet.zero()}};
  cfg.prev_popped = {spec.alphabet.blank()};
  auto r1 = qm_step(spec, cfg);
  CHECK(r1.appended == std::vector<Symbol>{spec.alphabet.blank()});
  auto r2 = qm_step(spec, cfg);
  // Step 2 appends step 1's pop.
  CHECK(r2.appended == std::vector<Symbol>{spec.alphabet.one()});
}

TEST_CASE("qm_run: echo cycles the input") {
  auto spec = zoo::echo();
  QmRunOptions opt;
  opt.fuel = 10;
  auto res = qm_run(spec, "01", opt);
  CHECK(!res.halted);
  CHECK(res.log.real_steps() == 10);
  const Symbol expect[2] = {spec.alphabet.zero(), spec.alphabet.one()};
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& rec = res.log.records[res.log.prompt_len + i];
    CHECK(rec.popped[0] == expect[i % 2]);
    CHECK(rec.appended[0] == expect[i % 2]);
  }
}

TEST_CASE("qm_run: halting machine, log length and space") {
  auto spec = zoo::halt_on_zero();
  QmRunOptions opt;
  opt.fuel = 100;
  auto res = qm_run(spec, "01", opt);  // first pop is 0: halts at the first real step
  CHECK(res.halted);
  CHECK(res.log.real_steps() == 1);
  CHECK(res.meter.space == 2);  // sum of queue sizes
}

TEST_CASE("qm_run: FIFO consistency and determinism") {
  for (auto spec : {zoo::echo(), zoo::halt_on_zero()}) {
    QmRunOptions opt;
    opt.fuel = 64;
    auto a = qm_run(spec, "1101", opt);
    auto b = qm_run(spec, "1101", opt);
    CHECK(check_fifo_consistency(spec, a.log).empty());
    REQUIRE(a.log.records.size() == b.log.records.size());
    for (std::size_t i = 0; i < a.log.records.size(); ++i) {
      CHECK(a.log.records[i].popped == b.log.records[i].popped);
      CHECK(a.log.records[i].appended == b.log.records[i].appended);
      CHECK(a.log.records[i].state == b.log.records[i].state);
    }
  }
  auto counter = zoo::binary_counter();
  QmRunOptions opt;
  opt.fuel = 96;
  auto res = qm_run(counter, "0110", opt);
  CHECK(check_fifo_consistency(counter, res.log).empty());
}

TEST_CASE("qm_run: queue lengths are pinned by synchrony") {
  auto spec = zoo::swap_machine();
  QmRunOptions opt;
  opt.fuel = 33;
  auto res = qm_run(spec, "0011", opt);
  for (const auto& q : res.final_config.queues) CHECK(q.size() == 4);
}

TEST_CASE("qm_run: binary counter increments once per pass") {
  auto spec = zoo::binary_counter();
  QmRunOptions opt;
  const std::string x = "00";  // value 0, LSB first
  const std::int64_t n = 2;
  opt.fuel = 2 * n + 6 * n;
  auto res = qm_run(spec, x, opt);
  // Pass p (p >= 2) pops the value p-2 and appends the value p-1, LSB first.
  // Hand trace: pass 2 pops 0,0 appends 1,0; pass 3 pops 1,0 appends 0,1.
  auto bit = [&](std::uint64_t step) {
    return res.log.record_at_step(step).appended[0] == spec.alphabet.one() ? 1 : 0;
  };
  // Pass 2 occupies steps 2n+1 .. 3n (the first marker arrival).
  CHECK(bit(2 * n + 1) == 1);
  CHECK(bit(2 * n + 2) == 0);
  CHECK(bit(3 * n + 1) == 0);
  CHECK(bit(3 * n + 2) == 1);
  CHECK(bit(4 * n + 1) == 1);
  CHECK(bit(4 * n + 2) == 1);
}

TEST_CASE("qm_run: input longer than s_0 is a validation error") {
  auto spec = zoo::echo();
  spec.sizes = {SizeExpr{0, 2}};
  CHECK_THROWS_AS(qm_run(spec, "0101", {}), ValidationError);
}

TEST_CASE("qm_run: blank left-padding feeds the virtual log convention") {
  auto spec = zoo::echo();
  spec.sizes = {SizeExpr{1, 2}};  // s_0 = n + 2
  QmRunOptions opt;
  opt.fuel = 12;
  auto res = qm_run(spec, "10", opt);
  // The first s_0 - n real pops are padding blanks; x_1 is popped at step s_0 + 1.
  const auto& log = res.log;
  CHECK(log.record_at_step(3).popped[0] == spec.alphabet.blank());
  CHECK(log.record_at_step(4).popped[0] == spec.alphabet.blank());
  CHECK(log.record_at_step(5).popped[0] == spec.alphabet.one());
  CHECK(log.record_at_step(6).popped[0] == spec.alphabet.zero());
  CHECK(check_fifo_consistency(spec, log).empty());
}
