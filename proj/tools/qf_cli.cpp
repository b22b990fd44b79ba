// queueformer command-line front end: run machine files, compile them onto
// leveled-queue stacks or transformer weights, and drive the verification
// suites. Exit codes: 0 success, 1 check failure, 2 usage/parse error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "queueformer/machine_io.hpp"
#include "queueformer/queue_machine.hpp"
#include "queueformer/tape_bridge.hpp"
#include "queueformer/tape_machine.hpp"
#include "queueformer/tf_build.hpp"
#include "queueformer/tf_io.hpp"
#include "queueformer/tf_run.hpp"

namespace {

struct Options {
  std::string machine;
  std::string input;
  std::uint64_t fuel = 100000;
  std::string space = "64";
  int levels = 2;
  int heads = 1;
  int layers = 0;
  std::string pe_variant = "key";
  std::string out;
  std::uint64_t seed = 0;
  std::int64_t window = 0;
  bool no_initial_scan = false;
};

std::vector<std::int64_t> parse_space_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  if (out.empty()) throw qf::ValidationError("--space is empty");
  return out;
}

qf::TapeTMSpec require_tape(const qf::MachineSpec& m) {
  if (const auto* t = std::get_if<qf::TapeTMSpec>(&m)) return *t;
  throw qf::ValidationError("this command needs a tape machine");
}

qf::QueueTMSpec require_queue(const qf::MachineSpec& m) {
  if (const auto* q = std::get_if<qf::QueueTMSpec>(&m)) return *q;
  throw qf::ValidationError("this command needs a queue machine");
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    qf::write_file(path, content);
}

qf::TfRunOptions tf_options(const Options& opt) {
  qf::TfRunOptions o;
  o.fuel = opt.fuel;
  o.pe_variant = opt.pe_variant == "query" ? qf::PeVariant::QuerySide : qf::PeVariant::KeySide;
  o.window = opt.window;
  return o;
}

int cmd_run_tm(const Options& opt) {
  auto spec = require_tape(qf::parse_machine_file(opt.machine));
  qf::TmRunOptions ro;
  ro.fuel = opt.fuel;
  ro.initial_scan = !opt.no_initial_scan;
  ro.record_trace = !opt.out.empty();
  auto res = qf::tm_run(spec, opt.input, ro);
  std::cout << "output: " << res.output << "\nhalted: " << (res.halted ? "yes" : "no")
            << "\nsteps: " << res.meter.steps << "\nspace: " << res.meter.space << "\n";
  if (!opt.out.empty()) {
    std::ostringstream csv;
    csv << "step,state";
    for (int t = 0; t < spec.k; ++t) csv << ",head_" << t;
    csv << "\n";
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      csv << i << "," << spec.states[static_cast<std::size_t>(res.trace[i].state)];
      for (auto h : res.trace[i].heads) csv << "," << h;
      csv << "\n";
    }
    qf::write_file(opt.out, csv.str());
  }
  return 0;
}

int cmd_run_qm(const Options& opt) {
  auto spec = require_queue(qf::parse_machine_file(opt.machine));
  qf::QmRunOptions ro;
  ro.fuel = opt.fuel;
  auto res = qf::qm_run(spec, opt.input, ro);
  std::cout << "output: " << res.output << "\nhalted: " << (res.halted ? "yes" : "no")
            << "\nsteps: " << res.meter.steps << "\nspace: " << res.meter.space << "\n";
  if (!opt.out.empty()) qf::write_file(opt.out, qf::trace_csv(spec, res.log));
  return 0;
}

int cmd_bridge(const Options& opt) {
  auto spec = require_tape(qf::parse_machine_file(opt.machine));
  auto s_list = parse_space_list(opt.space);
  qf::TapeBridge bridge(spec, opt.levels, s_list.front());
  qf::BridgeRunOptions ro;
  ro.fuel = opt.fuel;
  auto res = bridge.run(opt.input, ro);
  std::cout << "output: " << res.output << "\nhalted: " << (res.halted ? "yes" : "no")
            << "\ntm_steps: " << res.stats.tm_steps << "\nmachine_steps: "
            << res.stats.simulation_steps() << "\nqueue_tapes: " << bridge.queue_tape_count()
            << "\ntotal_cells: " << bridge.total_cells() << "\naudit_violations: "
            << res.audit.size() << "\n";
  for (const auto& v : res.audit) std::cerr << "audit: " << v << "\n";
  if (!opt.out.empty()) {
    std::ostringstream csv;
    csv << "stack_op_index,event,level\n";
    for (const auto& s : bridge.stacks())
      for (const auto& ev : s.transfer_log())
        csv << ev.op_index << "," << (ev.kind == qf::TransferKind::Push ? "PUSH" : "POP") << ","
            << ev.level << "\n";
    qf::write_file(opt.out, csv.str());
  }
  auto gaps = qf::transfer_gap_audit(bridge);
  if (!gaps.empty()) {
    std::cerr << "level,op_index_a,op_index_b,gap,required\n";
    for (const auto& g : gaps)
      std::cerr << g.level << "," << g.op_a << "," << g.op_b << "," << g.gap << "," << g.required
                << "\n";
  }
  return res.audit.empty() && gaps.empty() ? 0 : 1;
}

int cmd_build_tf(const Options& opt) {
  auto machine = require_queue(qf::parse_machine_file(opt.machine));
  qf::BuildOptions bo;
  bo.heads = opt.heads;
  bo.layers = opt.layers;
  bo.window_override = opt.window;
  auto spec = qf::build_transformer(machine, static_cast<std::int64_t>(opt.input.size()), bo);
  emit(opt.out, qf::serialize_transformer(spec));
  std::cerr << "head-layer product: " << spec.H * spec.L << ", d = " << spec.d
            << ", window = " << spec.window << ", parameters = " << spec.parameter_count() << "\n";
  return 0;
}

int cmd_run_tf(const Options& opt) {
  auto spec = qf::parse_transformer(qf::read_file(opt.machine));
  auto trace = qf::tf_run(spec, opt.input, tf_options(opt));
  std::cout << "generated: " << trace.generated() << "\nhalted: " << (trace.halted ? "yes" : "no")
            << "\nties: " << trace.tie_count << "\n";
  if (!opt.out.empty()) qf::write_file(opt.out, qf::cot_trace_csv(spec, trace));
  return trace.diagnostics.empty() ? 0 : 1;
}

int cmd_probe(const Options& opt) {
  auto machine = require_queue(qf::parse_machine_file(opt.machine));
  qf::BuildOptions bo;
  bo.heads = opt.heads;
  bo.layers = opt.layers;
  auto spec = qf::build_transformer(machine, static_cast<std::int64_t>(opt.input.size()), bo);
  auto trace = qf::tf_run(spec, opt.input, tf_options(opt));
  auto probe = qf::attention_sparsity_probe(trace, spec);
  emit(opt.out, qf::probe_csv(probe));
  std::cerr << "sparsity: " << (probe.pass ? "PASS" : "FAIL")
            << ", attended positions per head per step: "
            << (trace.attn_offsets.empty() ? 0 : 1) << "\n";
  return probe.pass ? 0 : 1;
}

int cmd_bench(const Options& opt) {
  auto spec = require_tape(qf::parse_machine_file(opt.machine));
  auto s_list = parse_space_list(opt.space);
  std::vector<std::pair<std::int64_t, int>> grid;
  for (auto s : s_list) grid.emplace_back(s, opt.levels);
  auto rows = qf::measure_slowdown(spec, {opt.input}, grid, opt.fuel);
  std::ostringstream csv;
  csv << "s,k_prime,stack_ops,machine_steps,ratio\n";
  for (const auto& r : rows)
    csv << r.s << "," << r.k_prime << "," << r.ops << "," << r.machine_steps << "," << r.ratio
        << "\n";
  emit(opt.out, csv.str());
  const double spread = qf::ratio_spread(rows);
  std::cerr << "ratio spread: " << spread << "\n";
  // With a multi-point grid the spread doubles as the scaling check.
  return rows.size() < 2 || spread < 4.0 ? 0 : 1;
}

int verify_queue(const qf::QueueTMSpec& machine, const Options& opt) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  qf::QmRunOptions qo;
  qo.fuel = opt.fuel;
  auto qres = qf::qm_run(machine, opt.input, qo);
  check("fifo-consistency", qf::check_fifo_consistency(machine, qres.log).empty());

  qf::BuildOptions bo;
  bo.heads = opt.heads;
  bo.layers = opt.layers;
  auto spec = qf::build_transformer(machine, static_cast<std::int64_t>(opt.input.size()), bo);

  auto trace = qf::tf_run(spec, opt.input, tf_options(opt));
  auto eq = qf::trace_equivalence(qres.log, trace);
  check("trace-equivalence", eq.match, eq.message);
  check("one-hot-attention", trace.tie_count == 0 && trace.diagnostics.empty());

  auto mism = qf::verify_ffn_table(machine, spec, 1'000'000, 100'000, opt.seed);
  bool reachable_ok = qf::verify_ffn_on_trace(spec, trace).empty();
  check("ffn-exactness", mism.empty() && reachable_ok,
        mism.empty() ? "" : std::to_string(mism.size()) + " mismatches");

  auto probe = qf::attention_sparsity_probe(trace, spec);
  check("attention-sparsity", probe.pass);

  auto [lo, hi] = spec.weight_range();
  check("weight-range", lo >= -2 && hi <= 2,
        "[" + std::to_string(lo) + "," + std::to_string(hi) + "]");

  // Window sufficiency: the truncated window changes nothing vs unlimited.
  auto wide = tf_options(opt);
  wide.window = -1;
  auto trace_wide = qf::tf_run(spec, opt.input, wide);
  bool same = trace_wide.tokens.size() == trace.tokens.size();
  for (std::size_t i = 0; same && i < trace.tokens.size(); ++i)
    same = trace.tokens[i].token == trace_wide.tokens[i].token;
  check("window-sufficiency", same);

  // Both relative-PE formulations generate the same trace.
  auto other = tf_options(opt);
  other.pe_variant = other.pe_variant == qf::PeVariant::KeySide ? qf::PeVariant::QuerySide
                                                                : qf::PeVariant::KeySide;
  auto trace_other = qf::tf_run(spec, opt.input, other);
  bool same_pe = trace_other.tokens.size() == trace.tokens.size();
  for (std::size_t i = 0; same_pe && i < trace.tokens.size(); ++i)
    same_pe = trace.tokens[i].token == trace_other.tokens[i].token;
  check("pe-variant-equivalence", same_pe);

  return failures == 0 ? 0 : 1;
}

int verify_tape(const qf::TapeTMSpec& machine, const Options& opt) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };
  auto s_list = parse_space_list(opt.space);
  qf::TmRunOptions to;
  to.fuel = opt.fuel;
  auto oracle = qf::tm_run(machine, opt.input, to);

  qf::TapeBridge bridge(machine, opt.levels, s_list.front());
  qf::BridgeRunOptions ro;
  ro.fuel = opt.fuel;
  auto res = bridge.run(opt.input, ro);
  check("output-equivalence", res.output == oracle.output && res.halted == oracle.halted,
        "bridge '" + res.output + "' vs oracle '" + oracle.output + "'");
  check("invariant-audit", res.audit.empty());
  check("transfer-spacing", qf::transfer_gap_audit(bridge).empty());
  const std::size_t bound = 16ull * static_cast<std::size_t>(machine.k) *
                            static_cast<std::size_t>(s_list.front() + 1);
  check("space-bound", bridge.total_cells() <= bound,
        std::to_string(bridge.total_cells()) + " <= " + std::to_string(bound));
  return failures == 0 ? 0 : 1;
}

int cmd_verify(const Options& opt) {
  auto m = qf::parse_machine_file(opt.machine);
  if (std::holds_alternative<qf::QueueTMSpec>(m))
    return verify_queue(std::get<qf::QueueTMSpec>(m), opt);
  return verify_tape(std::get<qf::TapeTMSpec>(m), opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"queueformer: machine-to-machine compilation and exact transformer simulation"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    cmd->add_option("--machine", opt.machine, "machine definition file")->required();
    auto* in = cmd->add_option("--input", opt.input, "binary input string");
    if (needs_input) in->required();
    cmd->add_option("--fuel", opt.fuel, "maximum number of steps");
    cmd->add_option("--space", opt.space, "space bound s (bench accepts a comma list)");
    cmd->add_option("--levels", opt.levels, "stack level count k'");
    cmd->add_option("--heads", opt.heads, "attention heads H");
    cmd->add_option("--layers", opt.layers, "decoder layers L (0 = K/H)");
    cmd->add_option("--pe-variant", opt.pe_variant, "key|query relative-PE formulation")
        ->check(CLI::IsMember({"key", "query"}));
    cmd->add_option("--out", opt.out, "output file path");
    cmd->add_option("--seed", opt.seed, "seed for randomized checks");
    cmd->add_option("--window", opt.window, "context window override (tf commands)");
    cmd->add_flag("--no-initial-scan", opt.no_initial_scan, "skip the harness input scan (run-tm)");
  };

  add_common(app.add_subcommand("run-tm", "run a tape machine"), true);
  add_common(app.add_subcommand("run-qm", "run a synchronous queue machine"), true);
  add_common(app.add_subcommand("bridge", "simulate a tape machine on leveled queue stacks"), true);
  add_common(app.add_subcommand("build-tf", "compile a queue machine into transformer weights"), true);
  add_common(app.add_subcommand("run-tf", "run a serialized transformer"), true);
  add_common(app.add_subcommand("verify", "trace equivalence and invariant suites"), true);
  add_common(app.add_subcommand("bench", "slowdown grid, writes the cost CSV"), true);
  add_common(app.add_subcommand("probe", "attention offset histogram"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "run-tm") return cmd_run_tm(opt);
    if (cmd == "run-qm") return cmd_run_qm(opt);
    if (cmd == "bridge") return cmd_bridge(opt);
    if (cmd == "build-tf") return cmd_build_tf(opt);
    if (cmd == "run-tf") return cmd_run_tf(opt);
    if (cmd == "verify") return cmd_verify(opt);
    if (cmd == "bench") return cmd_bench(opt);
    if (cmd == "probe") return cmd_probe(opt);
  } catch (const qf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const qf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
