#include <doctest.h>

#include <string>

#include "queueformer/machine_io.hpp"
#include "queueformer/tf_build.hpp"
#include "queueformer/tf_io.hpp"
#include "queueformer/tf_run.hpp"
#include "queueformer/zoo.hpp"

using namespace qf;

TEST_CASE("machine files: parse a hand-written queue machine") {
  const std::string text = R"(# two-queue exchange
[meta]
kind = queue
queues = 2
start = go
halt = stop

[alphabet]
0 1 _

[states]
go stop

[sizes]
q0 = n
q1 = n

[delta]
go , 0 0 -> go , 0 0
go , 0 1 -> go , 1 0
go , 0 _ -> go , _ 0
go , 1 0 -> go , 0 1
go , 1 1 -> go , 1 1
go , 1 _ -> go , _ 1
go , _ 0 -> go , 0 _
go , _ 1 -> go , 1 _
go , _ _ -> go , _ _
)";
  auto m = parse_machine(text);
  REQUIRE(std::holds_alternative<QueueTMSpec>(m));
  const auto& spec = std::get<QueueTMSpec>(m);
  CHECK(spec.num_queues == 2);
  CHECK(spec == zoo::swap_machine());
}

TEST_CASE("machine files: delta arity errors carry the line number") {
  const std::string text = R"([meta]
kind = queue
queues = 2
start = go
halt = stop

[alphabet]
0 1 _

[states]
go stop

[sizes]
q0 = n
q1 = n

[delta]
go , 0 -> go , 0 0
)";
  try {
    parse_machine(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 18);
  }
}

TEST_CASE("machine files: serialize/parse round trip") {
  SUBCASE("queue machines") {
    for (auto spec : {zoo::echo(), zoo::swap_machine(), zoo::binary_counter(),
                      zoo::halt_on_zero(), zoo::delayed_echo()}) {
      auto back = parse_machine(serialize_machine(spec));
      REQUIRE(std::holds_alternative<QueueTMSpec>(back));
      CHECK(std::get<QueueTMSpec>(back) == spec);
    }
  }
  SUBCASE("tape machines") {
    for (auto spec : {zoo::mover(), zoo::copy_machine(), zoo::unary_counter(), zoo::palindrome(),
                      zoo::sweeper(4)}) {
      auto back = parse_machine(serialize_machine(spec));
      REQUIRE(std::holds_alternative<TapeTMSpec>(back));
      CHECK(std::get<TapeTMSpec>(back) == spec);
    }
  }
}

#ifdef QF_MACHINES_DIR
TEST_CASE("committed machine files match the built-in definitions") {
  const std::string dir = QF_MACHINES_DIR;
  auto check_queue = [&](const char* file, const QueueTMSpec& want) {
    auto m = parse_machine_file(dir + "/" + file);
    REQUIRE(std::holds_alternative<QueueTMSpec>(m));
    CHECK(std::get<QueueTMSpec>(m) == want);
  };
  auto check_tape = [&](const char* file, const TapeTMSpec& want) {
    auto m = parse_machine_file(dir + "/" + file);
    REQUIRE(std::holds_alternative<TapeTMSpec>(m));
    CHECK(std::get<TapeTMSpec>(m) == want);
  };
  check_queue("echo.qm", zoo::echo());
  check_queue("swap.qm", zoo::swap_machine());
  check_queue("counter.qm", zoo::binary_counter());
  check_queue("halt0.qm", zoo::halt_on_zero());
  check_queue("delayed_echo.qm", zoo::delayed_echo());
  check_queue("rotate4.qm", zoo::rotate4());
  check_tape("mover.tm", zoo::mover());
  check_tape("copy.tm", zoo::copy_machine());
  check_tape("unary_counter.tm", zoo::unary_counter());
  check_tape("palindrome.tm", zoo::palindrome());
  check_tape("sweep.tm", zoo::sweeper(6));
}
#endif

TEST_CASE("size expressions") {
  CHECK(SizeExpr::parse("n") == SizeExpr{1, 0});
  CHECK(SizeExpr::parse("2n") == SizeExpr{2, 0});
  CHECK(SizeExpr::parse("n+4") == SizeExpr{1, 4});
  CHECK(SizeExpr::parse("n-2") == SizeExpr{1, -2});
  CHECK(SizeExpr::parse("16") == SizeExpr{0, 16});
  CHECK(SizeExpr{2, 2}.eval(3) == 8);
  CHECK(SizeExpr::parse(SizeExpr{2, 2}.str()) == SizeExpr{2, 2});
  CHECK_THROWS_AS(SizeExpr::parse("frog"), ValidationError);
}

TEST_CASE("transformer spec: serialize/parse round trip preserves the run") {
  auto machine = zoo::binary_counter();
  auto spec = build_transformer(machine, 4);
  auto text = serialize_transformer(spec);
  auto back = parse_transformer(text);
  CHECK(back.c == spec.c);
  CHECK(back.d == spec.d);
  CHECK(back.window == spec.window);
  CHECK(back.queue_sizes == spec.queue_sizes);
  CHECK(back.pe == spec.pe);
  CHECK(back.ffn == spec.ffn);
  CHECK(back.heads == spec.heads);
  TfRunOptions to;
  to.fuel = 100;
  auto a = tf_run(spec, "0110", to);
  auto b = tf_run(back, "0110", to);
  REQUIRE(a.tokens.size() == b.tokens.size());
  for (std::size_t i = 0; i < a.tokens.size(); ++i)
    CHECK(a.tokens[i].token == b.tokens[i].token);
}

TEST_CASE("trace CSV: emitted files parse with the suite's own reader") {
  auto machine = zoo::echo();
  QmRunOptions qo;
  qo.fuel = 6;
  auto res = qm_run(machine, "01", qo);
  auto csv = trace_csv(machine, res.log);
  auto table = parse_csv(csv);
  REQUIRE(table.header.size() == 5);  // step,state,popped_0,appended_0,parity
  CHECK(table.header[0] == "step");
  CHECK(table.rows.size() == res.log.records.size());
  // The first real row pops the first input bit.
  CHECK(table.rows[2][2] == "0");

  SUBCASE("cot trace and probe CSVs") {
    auto spec = build_transformer(machine, 2);
    TfRunOptions to;
    to.fuel = 6;
    auto trace = tf_run(spec, "01", to);
    auto cot = parse_csv(cot_trace_csv(spec, trace));
    CHECK(cot.header[1] == "source");
    CHECK(cot.rows.size() == trace.tokens.size());
    CHECK(cot.rows[0][1] == "prompt");
    CHECK(cot.rows.back()[1] == "generated");
    auto probe = attention_sparsity_probe(trace, spec);
    auto ptable = parse_csv(probe_csv(probe));
    CHECK(ptable.header == std::vector<std::string>{"layer", "head", "offset", "count"});
    CHECK(!ptable.rows.empty());
  }
}
