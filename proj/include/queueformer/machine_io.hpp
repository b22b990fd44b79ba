#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "queueformer/queue_machine.hpp"
#include "queueformer/tape_machine.hpp"

namespace qf {

using MachineSpec = std::variant<TapeTMSpec, QueueTMSpec>;

namespace io_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace io_detail

// Line-oriented machine definition format. Sections: [meta], [alphabet],
// [states], [sizes] (queue machines), [delta]. `_` denotes the blank. Delta
// lines:
//   tape:   q , s0 .. s{k-1} -> q' , w1 .. w{k-1} , m0 .. m{k-1}
//   queue:  q , s0 .. s{K-1} -> q' , a0 .. a{K-1}
//   queue (lookbehind 2):  q , s0 .. , p0 .. -> q' , a0 ..
inline MachineSpec parse_machine(const std::string& text) {
  enum class Section { None, Meta, Alphabet, States, Sizes, Delta };
  Section section = Section::None;
  std::map<std::string, std::string> meta;
  std::vector<std::string> alphabet_names, state_names;
  std::vector<std::pair<int, std::string>> size_lines, delta_lines;

  int lineno = 0;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    line = io_detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[meta]") section = Section::Meta;
      else if (line == "[alphabet]") section = Section::Alphabet;
      else if (line == "[states]") section = Section::States;
      else if (line == "[sizes]") section = Section::Sizes;
      else if (line == "[delta]") section = Section::Delta;
      else throw ParseError(lineno, "unknown section " + line);
      continue;
    }
    switch (section) {
      case Section::None:
        throw ParseError(lineno, "content before any section header");
      case Section::Meta: {
        auto kv = io_detail::split(line, '=');
        if (kv.size() != 2) throw ParseError(lineno, "expected key = value");
        meta[io_detail::trim(kv[0])] = io_detail::trim(kv[1]);
        break;
      }
      case Section::Alphabet:
        for (const auto& t : io_detail::tokens(line)) alphabet_names.push_back(t);
        break;
      case Section::States:
        for (const auto& t : io_detail::tokens(line)) state_names.push_back(t);
        break;
      case Section::Sizes:
        size_lines.emplace_back(lineno, line);
        break;
      case Section::Delta:
        delta_lines.emplace_back(lineno, line);
        break;
    }
  }

  auto require = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(0, std::string("[meta] is missing '") + key + "'");
    return it->second;
  };
  const std::string kind = require("kind");
  Alphabet alphabet = Alphabet::from_names(alphabet_names);
  if (state_names.empty()) throw ParseError(0, "[states] is empty");

  auto state_id = [&](const std::string& name, int line) {
    for (std::size_t i = 0; i < state_names.size(); ++i)
      if (state_names[i] == name) return static_cast<int>(i);
    throw ParseError(line, "unknown state '" + name + "'");
  };
  auto symbol = [&](const std::string& name, int line) {
    if (!alphabet.has(name)) throw ParseError(line, "unknown symbol '" + name + "'");
    return alphabet.symbol(name);
  };

  if (kind == "tape") {
    TapeTMSpec spec;
    spec.k = std::stoi(require("tapes"));
    spec.alphabet = alphabet;
    spec.states = state_names;
    spec.start_state = state_id(require("start"), 0);
    spec.halt_state = state_id(require("halt"), 0);
    spec.output_tape = meta.count("output_tape") ? std::stoi(meta["output_tape"]) : spec.k - 1;
    spec.delta.assign(spec.delta_size(), std::nullopt);
    for (const auto& [line, text_line] : delta_lines) {
      auto arrow = io_detail::split(text_line, '>');
      if (arrow.size() != 2 || arrow[0].empty() || arrow[0].back() != '-')
        throw ParseError(line, "expected '->'");
      arrow[0].pop_back();
      auto lhs = io_detail::split(arrow[0], ',');
      auto rhs = io_detail::split(arrow[1], ',');
      if (lhs.size() != 2) throw ParseError(line, "left side must be 'state , symbols'");
      if (rhs.size() != 3) throw ParseError(line, "right side must be 'state , writes , moves'");
      int q = state_id(io_detail::trim(lhs[0]), line);
      auto read_toks = io_detail::tokens(lhs[1]);
      if (static_cast<int>(read_toks.size()) != spec.k)
        throw ParseError(line, "expected " + std::to_string(spec.k) + " read symbols");
      std::vector<Symbol> read;
      for (const auto& t : read_toks) read.push_back(symbol(t, line));
      TapeAction act;
      act.next_state = state_id(io_detail::trim(rhs[0]), line);
      for (const auto& t : io_detail::tokens(rhs[1])) act.writes.push_back(symbol(t, line));
      if (static_cast<int>(act.writes.size()) != spec.k - 1)
        throw ParseError(line, "expected " + std::to_string(spec.k - 1) + " written symbols");
      auto move_toks = io_detail::tokens(rhs[2]);
      if (static_cast<int>(move_toks.size()) != spec.k)
        throw ParseError(line, "expected " + std::to_string(spec.k) + " moves");
      for (const auto& t : move_toks) {
        if (t.size() != 1) throw ParseError(line, "bad move '" + t + "'");
        act.moves.push_back(move_from_char(t[0]));
      }
      spec.set_transition(q, read, std::move(act));
    }
    auto violations = validate_spec(spec);
    if (!violations.empty()) throw ValidationError(violations.front());
    return spec;
  }
  if (kind == "queue") {
    QueueTMSpec spec;
    spec.num_queues = std::stoi(require("queues"));
    spec.alphabet = alphabet;
    spec.states = state_names;
    spec.start_state = state_id(require("start"), 0);
    spec.halt_state = state_id(require("halt"), 0);
    spec.lookbehind = meta.count("lookbehind") ? std::stoi(meta["lookbehind"]) : 1;
    spec.sizes.assign(static_cast<std::size_t>(spec.num_queues), SizeExpr{});
    for (const auto& [line, text_line] : size_lines) {
      auto kv = io_detail::split(text_line, '=');
      if (kv.size() != 2) throw ParseError(line, "expected 'q<r> = expr'");
      std::string key = io_detail::trim(kv[0]);
      if (key.size() < 2 || key[0] != 'q') throw ParseError(line, "size key must be q<r>");
      int r = std::stoi(key.substr(1));
      if (r < 0 || r >= spec.num_queues) throw ParseError(line, "queue index out of range");
      spec.sizes[static_cast<std::size_t>(r)] = SizeExpr::parse(io_detail::trim(kv[1]));
    }
    spec.delta.assign(spec.delta_size(), std::nullopt);
    for (const auto& entry : delta_lines) {
      const int line = entry.first;
      const std::string& text_line = entry.second;
      auto arrow = io_detail::split(text_line, '>');
      if (arrow.size() != 2 || arrow[0].empty() || arrow[0].back() != '-')
        throw ParseError(line, "expected '->'");
      arrow[0].pop_back();
      auto lhs = io_detail::split(arrow[0], ',');
      auto rhs = io_detail::split(arrow[1], ',');
      const std::size_t expected_lhs = spec.lookbehind == 2 ? 3 : 2;
      if (lhs.size() != expected_lhs)
        throw ParseError(line, "left side must be 'state , popped" +
                                   std::string(spec.lookbehind == 2 ? " , previous'" : "'"));
      if (rhs.size() != 2) throw ParseError(line, "right side must be 'state , appends'");
      int q = state_id(io_detail::trim(lhs[0]), line);
      auto parse_syms = [&](const std::string& seg) {
        std::vector<Symbol> out;
        for (const auto& t : io_detail::tokens(seg)) out.push_back(symbol(t, line));
        if (static_cast<int>(out.size()) != spec.num_queues)
          throw ParseError(line, "expected " + std::to_string(spec.num_queues) + " symbols");
        return out;
      };
      std::vector<Symbol> popped = parse_syms(lhs[1]);
      std::vector<Symbol> prev;
      if (spec.lookbehind == 2) prev = parse_syms(lhs[2]);
      QueueAction act;
      act.next_state = state_id(io_detail::trim(rhs[0]), line);
      act.appends = parse_syms(rhs[1]);
      spec.set_transition(q, popped, std::move(act), prev);
    }
    auto violations = validate_spec(spec);
    if (!violations.empty()) throw ValidationError(violations.front());
    return spec;
  }
  throw ParseError(0, "kind must be 'tape' or 'queue'");
}

inline MachineSpec parse_machine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open machine file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_machine(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

inline std::string serialize_machine(const TapeTMSpec& spec) {
  std::ostringstream out;
  out << "[meta]\nkind = tape\ntapes = " << spec.k << "\nstart = " << spec.states[static_cast<std::size_t>(spec.start_state)]
      << "\nhalt = " << spec.states[static_cast<std::size_t>(spec.halt_state)]
      << "\noutput_tape = " << spec.output_tape << "\n\n[alphabet]\n";
  for (const auto& s : spec.alphabet.names()) out << s << " ";
  out << "\n\n[states]\n";
  for (const auto& s : spec.states) out << s << " ";
  out << "\n\n[delta]\n";
  const int S = spec.alphabet.size();
  std::vector<Symbol> syms(static_cast<std::size_t>(spec.k), 0);
  for (int q = 0; q < static_cast<int>(spec.states.size()); ++q) {
    if (q == spec.halt_state) continue;
    std::fill(syms.begin(), syms.end(), 0);
    while (true) {
      const auto& slot = spec.delta[spec.delta_index(q, syms)];
      if (slot) {
        out << spec.states[static_cast<std::size_t>(q)] << " ,";
        for (Symbol s : syms) out << " " << spec.alphabet.name(s);
        out << " -> " << spec.states[static_cast<std::size_t>(slot->next_state)] << " ,";
        for (Symbol s : slot->writes) out << " " << spec.alphabet.name(s);
        out << " ,";
        for (Move m : slot->moves) out << " " << move_char(m);
        out << "\n";
      }
      int i = spec.k - 1;
      for (; i >= 0; --i) {
        if (++syms[static_cast<std::size_t>(i)] < S) break;
        syms[static_cast<std::size_t>(i)] = 0;
      }
      if (i < 0) break;
    }
  }
  return out.str();
}

inline std::string serialize_machine(const QueueTMSpec& spec) {
  std::ostringstream out;
  out << "[meta]\nkind = queue\nqueues = " << spec.num_queues << "\nstart = "
      << spec.states[static_cast<std::size_t>(spec.start_state)] << "\nhalt = "
      << spec.states[static_cast<std::size_t>(spec.halt_state)] << "\nlookbehind = " << spec.lookbehind
      << "\n\n[alphabet]\n";
  for (const auto& s : spec.alphabet.names()) out << s << " ";
  out << "\n\n[states]\n";
  for (const auto& s : spec.states) out << s << " ";
  out << "\n\n[sizes]\n";
  for (int r = 0; r < spec.num_queues; ++r)
    out << "q" << r << " = " << spec.sizes[static_cast<std::size_t>(r)].str() << "\n";
  out << "\n[delta]\n";
  const std::size_t S = static_cast<std::size_t>(spec.alphabet.size());
  const int tuples = spec.lookbehind == 2 ? 2 * spec.num_queues : spec.num_queues;
  std::vector<Symbol> syms(static_cast<std::size_t>(tuples), 0);
  for (int q = 0; q < static_cast<int>(spec.states.size()); ++q) {
    if (q == spec.halt_state) continue;
    std::fill(syms.begin(), syms.end(), 0);
    while (true) {
      std::vector<Symbol> popped(syms.begin(), syms.begin() + spec.num_queues);
      std::vector<Symbol> prev(syms.begin() + spec.num_queues, syms.end());
      const auto& slot = spec.delta[spec.delta_index(q, popped, prev)];
      if (slot) {
        out << spec.states[static_cast<std::size_t>(q)] << " ,";
        for (Symbol s : popped) out << " " << spec.alphabet.name(s);
        if (spec.lookbehind == 2) {
          out << " ,";
          for (Symbol s : prev) out << " " << spec.alphabet.name(s);
        }
        out << " -> " << spec.states[static_cast<std::size_t>(slot->next_state)] << " ,";
        for (Symbol s : slot->appends) out << " " << spec.alphabet.name(s);
        out << "\n";
      }
      int i = tuples - 1;
      for (; i >= 0; --i) {
        if (++syms[static_cast<std::size_t>(i)] < static_cast<Symbol>(S)) break;
        syms[static_cast<std::size_t>(i)] = 0;
      }
      if (i < 0) break;
    }
  }
  return out.str();
}

// --- CSV emission ---------------------------------------------------------------

// Trace CSV: step,state,popped_0..popped_{K-1},appended_0..appended_{K-1},parity
inline std::string trace_csv(const QueueTMSpec& spec, const ExecutionLog& log) {
  std::ostringstream out;
  out << "step,state";
  for (int r = 0; r < log.num_queues; ++r) out << ",popped_" << r;
  for (int r = 0; r < log.num_queues; ++r) out << ",appended_" << r;
  out << ",parity\n";
  for (const auto& rec : log.records) {
    out << rec.step << "," << spec.states[static_cast<std::size_t>(rec.state)];
    for (Symbol s : rec.popped) out << "," << spec.alphabet.name(s);
    for (Symbol s : rec.appended) out << "," << spec.alphabet.name(s);
    out << "," << rec.parity << "\n";
  }
  return out.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = io_detail::trim(line);
    if (line.empty()) continue;
    auto fields = io_detail::split(line, ',');
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

}  // namespace qf
