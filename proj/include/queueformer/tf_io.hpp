#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "queueformer/machine_io.hpp"
#include "queueformer/tf_build.hpp"
#include "queueformer/tf_run.hpp"

namespace qf {

// Structured-text serialization of a compiled model. Sections: [dims]
// (scalars, sizes, states, alphabet), [pe] (rows `delta: v_0 .. v_{d/H-1}`),
// [qkv l k] (sparse `M row col value` triples), [ffn i] (dense integer rows),
// [vocab] (token <-> index table). All integers decimal.
inline std::string serialize_transformer(const TransformerSpec& spec) {
  std::ostringstream out;
  out << "[dims]\n";
  out << "c = " << spec.c << "\nK = " << spec.K << "\nH = " << spec.H << "\nL = " << spec.L
      << "\nd = " << spec.d << "\nn = " << spec.n << "\nwindow = " << spec.window << "\n";
  out << "sizes =";
  for (auto s : spec.queue_sizes) out << " " << s;
  out << "\nalphabet =";
  for (const auto& s : spec.alphabet.names()) out << " " << s;
  out << "\nstates =";
  for (const auto& s : spec.state_names) out << " " << s;
  out << "\nstart = " << spec.state_names[static_cast<std::size_t>(spec.start_state)];
  out << "\nhalt = " << spec.state_names[static_cast<std::size_t>(spec.halt_state)] << "\n";

  out << "\n[pe]\n";
  for (std::size_t delta = 0; delta < spec.pe.size(); ++delta) {
    out << delta << ":";
    for (int v : spec.pe[delta]) out << " " << v;
    out << "\n";
  }

  for (int l = 0; l < spec.L; ++l)
    for (int k = 0; k < spec.H; ++k) {
      out << "\n[qkv " << l << " " << k << "]\n";
      const auto& m = spec.heads[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
      for (const auto& e : m.qmat) out << "Q " << e.row << " " << e.col << " " << e.value << "\n";
      for (const auto& e : m.kmat) out << "K " << e.row << " " << e.col << " " << e.value << "\n";
      for (const auto& e : m.vmat) out << "V " << e.row << " " << e.col << " " << e.value << "\n";
    }

  for (std::size_t i = 0; i < spec.ffn.layers.size(); ++i) {
    const auto& layer = spec.ffn.layers[i];
    out << "\n[ffn " << i << "]\n";
    out << (layer.relu ? "relu" : "linear") << " " << layer.weights.size() << " "
        << (layer.weights.empty() ? 0 : layer.weights[0].size()) << "\n";
    for (const auto& row : layer.weights) {
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
      out << "\n";
    }
    out << "bias:";
    for (int b : layer.bias) out << " " << b;
    out << "\n";
  }

  out << "\n[vocab]\n";
  for (std::size_t v = 0; v < spec.vocab_size(); ++v) {
    Token t = spec.token_at(v);
    out << v << ":";
    for (Symbol s : t.symbols) out << " " << spec.alphabet.name(s);
    out << " " << t.state << " " << t.parity << "\n";
  }
  return out.str();
}

inline TransformerSpec parse_transformer(const std::string& text) {
  TransformerSpec spec;
  std::istringstream in(text);
  std::string line, section;
  int ffn_index = -1, qkv_l = -1, qkv_k = -1;
  std::vector<std::string> alphabet_names;
  std::string start_name, halt_name;
  int lineno = 0;
  FfnLayer* layer = nullptr;
  std::size_t rows_expected = 0;

  while (std::getline(in, line)) {
    ++lineno;
    line = io_detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      auto toks = io_detail::tokens(line.substr(1, line.size() - 2));
      section = toks[0];
      if (section == "qkv") {
        qkv_l = std::stoi(toks.at(1));
        qkv_k = std::stoi(toks.at(2));
        if (spec.heads.size() <= static_cast<std::size_t>(qkv_l)) spec.heads.resize(static_cast<std::size_t>(qkv_l) + 1);
        auto& row = spec.heads[static_cast<std::size_t>(qkv_l)];
        if (row.size() <= static_cast<std::size_t>(qkv_k)) row.resize(static_cast<std::size_t>(qkv_k) + 1);
      } else if (section == "ffn") {
        ffn_index = std::stoi(toks.at(1));
        if (spec.ffn.layers.size() <= static_cast<std::size_t>(ffn_index))
          spec.ffn.layers.resize(static_cast<std::size_t>(ffn_index) + 1);
        layer = &spec.ffn.layers[static_cast<std::size_t>(ffn_index)];
        rows_expected = 0;
      }
      continue;
    }
    if (section == "dims") {
      auto kv = io_detail::split(line, '=');
      if (kv.size() != 2) throw ParseError(lineno, "expected key = value");
      std::string key = io_detail::trim(kv[0]);
      std::string val = io_detail::trim(kv[1]);
      if (key == "c") spec.c = std::stoi(val);
      else if (key == "K") spec.K = std::stoi(val);
      else if (key == "H") spec.H = std::stoi(val);
      else if (key == "L") spec.L = std::stoi(val);
      else if (key == "d") spec.d = std::stoi(val);
      else if (key == "n") spec.n = std::stoll(val);
      else if (key == "window") spec.window = std::stoll(val);
      else if (key == "sizes") {
        for (const auto& t : io_detail::tokens(val)) spec.queue_sizes.push_back(std::stoll(t));
      } else if (key == "alphabet") alphabet_names = io_detail::tokens(val);
      else if (key == "states") spec.state_names = io_detail::tokens(val);
      else if (key == "start") start_name = val;
      else if (key == "halt") halt_name = val;
      else throw ParseError(lineno, "unknown [dims] key '" + key + "'");
    } else if (section == "pe") {
      auto kv = io_detail::split(line, ':');
      if (kv.size() != 2) throw ParseError(lineno, "expected 'delta: values'");
      std::vector<int> row;
      for (const auto& t : io_detail::tokens(kv[1])) row.push_back(std::stoi(t));
      spec.pe.push_back(std::move(row));
    } else if (section == "qkv") {
      auto toks = io_detail::tokens(line);
      if (toks.size() != 4) throw ParseError(lineno, "expected 'M row col value'");
      SparseEntry e{std::stoi(toks[1]), std::stoi(toks[2]), std::stoi(toks[3])};
      auto& m = spec.heads[static_cast<std::size_t>(qkv_l)][static_cast<std::size_t>(qkv_k)];
      if (toks[0] == "Q") m.qmat.push_back(e);
      else if (toks[0] == "K") m.kmat.push_back(e);
      else if (toks[0] == "V") m.vmat.push_back(e);
      else throw ParseError(lineno, "matrix tag must be Q, K or V");
    } else if (section == "ffn") {
      if (line.rfind("bias:", 0) == 0) {
        for (const auto& t : io_detail::tokens(line.substr(5))) layer->bias.push_back(std::stoi(t));
      } else if (rows_expected == 0) {
        auto toks = io_detail::tokens(line);
        if (toks.size() != 3) throw ParseError(lineno, "expected 'relu|linear rows cols'");
        layer->relu = toks[0] == "relu";
        rows_expected = static_cast<std::size_t>(std::stoul(toks[1]));
      } else {
        std::vector<int> row;
        for (const auto& t : io_detail::tokens(line)) row.push_back(std::stoi(t));
        layer->weights.push_back(std::move(row));
      }
    } else if (section == "vocab") {
      // The table is fully determined by [dims]; kept in the file for readers.
      continue;
    } else {
      throw ParseError(lineno, "content outside a known section");
    }
  }
  spec.alphabet = Alphabet::from_names(alphabet_names);
  spec.dH = spec.H > 0 ? spec.d / spec.H : 0;
  spec.start_state = 0;
  spec.halt_state = 0;
  for (std::size_t i = 0; i < spec.state_names.size(); ++i) {
    if (spec.state_names[i] == start_name) spec.start_state = static_cast<int>(i);
    if (spec.state_names[i] == halt_name) spec.halt_state = static_cast<int>(i);
  }
  return spec;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// CoT trace CSV: step,source,state,symbols_0..K-1,parity
inline std::string cot_trace_csv(const TransformerSpec& spec, const CotTrace& trace) {
  std::ostringstream out;
  out << "step,source,state";
  for (int r = 0; r < spec.K; ++r) out << ",symbols_" << r;
  out << ",parity\n";
  for (std::size_t i = 0; i < trace.tokens.size(); ++i) {
    const auto& t = trace.tokens[i];
    out << (i + 1) << "," << (t.prompt ? "prompt" : "generated") << ","
        << spec.state_names[static_cast<std::size_t>(t.token.state)];
    for (Symbol s : t.token.symbols) out << "," << spec.alphabet.name(s);
    out << "," << t.token.parity << "\n";
  }
  return out.str();
}

// Probe CSV: layer,head,offset,count
inline std::string probe_csv(const ProbeResult& probe) {
  std::ostringstream out;
  out << "layer,head,offset,count\n";
  for (const auto& row : probe.rows)
    out << row.layer << "," << row.head << "," << row.offset << "," << row.count << "\n";
  return out.str();
}

}  // namespace qf
