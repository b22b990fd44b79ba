#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "queueformer/errors.hpp"
#include "queueformer/tf_build.hpp"

namespace qf {

enum class PeVariant : std::uint8_t {
  KeySide,   // score = <h_j K + pos(i-j), h_i Q>
  QuerySide  // score = <h_j K, h_i Q> + <pos(i-j), h_i Q>
};

struct TfRunOptions {
  std::uint64_t fuel = 1'000'000;   // generated-token budget
  PeVariant pe_variant = PeVariant::KeySide;
  std::int64_t window = 0;          // 0 = spec window, < 0 = unlimited context
  bool strict_one_hot = false;      // throw on attention ties instead of recording
  bool check_locality = true;       // audit the layer-residual locality claim
};

struct CotToken {
  Token token;
  bool prompt = false;
};

struct AttnRecord {
  std::uint64_t position;  // query position (1-based)
  int layer = 0, head = 0;
  std::int64_t offset = 0;  // attended relative offset i - j*
};

struct CotTrace {
  std::vector<CotToken> tokens;  // tokens[p-1] is position p
  std::vector<AttnRecord> attn_offsets;
  bool halted = false;
  std::uint64_t prompt_len = 0;
  std::uint64_t tie_count = 0;  // TieObserved diagnostics
  std::vector<std::string> diagnostics;

  std::size_t generated() const { return tokens.size() - static_cast<std::size_t>(prompt_len); }
};

// Hardmax over exact integer scores: weight 1 at the maximum. A non-unique
// maximum picks the most recent position and raises the TieObserved flag; in
// correct constructions ties never occur.
inline std::size_t hardmax_index(const std::vector<std::int64_t>& scores, bool* tie) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j)
    if (scores[j] >= scores[best]) best = j;  // >= keeps the largest index
  if (tie) {
    *tie = false;
    for (std::size_t j = 0; j < scores.size(); ++j)
      if (j != best && scores[j] == scores[best]) *tie = true;
  }
  return best;
}

// One-hot weight form of the same selection.
inline std::vector<std::int64_t> hardmax(const std::vector<std::int64_t>& scores,
                                         bool* tie = nullptr) {
  std::vector<std::int64_t> w(scores.size(), 0);
  w[hardmax_index(scores, tie)] = 1;
  return w;
}

// Exact-integer decoder state over a growing context. Layer states are cached
// per position; generation appends tokens and queries the newest position.
class TfRuntime {
 public:
  TfRuntime(const TransformerSpec& spec, const TfRunOptions& options, CotTrace& trace)
      : spec_(spec), options_(options), trace_(trace) {}

  // Appends a token as the next position and computes its layer states.
  void append(const Token& token, bool prompt) {
    trace_.tokens.push_back({token, prompt});
    std::vector<std::vector<std::int64_t>> layers;
    layers.push_back(embed(token, spec_));
    const std::size_t i = trace_.tokens.size();  // 1-based position
    for (int l = 0; l < spec_.L; ++l) {
      std::vector<std::int64_t> h = layers.back();
      for (int k = 0; k < spec_.H; ++k) {
        auto [head_out, offset] = attention_head(l, k, i, layers.back());
        // Heads are concatenated: head k owns dimensions [k*dH, (k+1)*dH).
        for (int jj = 0; jj < spec_.dH; ++jj)
          h[static_cast<std::size_t>(k * spec_.dH + jj)] += head_out[static_cast<std::size_t>(jj)];
        trace_.attn_offsets.push_back({i, l, k, offset});
      }
      // W^l is the identity and b^l zero; FF^l is zero except the last layer.
      if (l == spec_.L - 1) {
        auto dv = spec_.ffn.eval(h);
        for (int j = 0; j < spec_.d; ++j) h[static_cast<std::size_t>(j)] += dv[static_cast<std::size_t>(j)];
      } else if (options_.check_locality) {
        check_locality(h, layers.front(), i, l + 1);
      }
      range_check(h, i);
      layers.push_back(std::move(h));
    }
    states_.push_back(std::move(layers));
  }

  // The next-token function applied at the newest position.
  Token predict() const {
    const auto& hL = states_.back().back();
    return decode(hL);
  }

 private:
  // Score and select over the window ending at query position i (1-based);
  // returns the head output (value vector of the attended position) and the
  // attended relative offset.
  std::pair<std::vector<std::int64_t>, std::int64_t> attention_head(
      int l, int k, std::size_t i, const std::vector<std::int64_t>& hq) {
    const HeadMatrices& m = spec_.heads[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
    std::vector<std::int64_t> q = mul_sparse(hq, m.qmat);
    std::int64_t window = options_.window == 0 ? spec_.window : options_.window;
    std::size_t lo = 1;
    if (window > 0 && static_cast<std::int64_t>(i) > window)
      lo = i - static_cast<std::size_t>(window) + 1;
    std::vector<std::int64_t> scores;
    scores.reserve(i - lo + 1);
    for (std::size_t j = lo; j <= i; ++j) {
      // Position i itself is still under construction; hq is its layer-l state.
      const auto& hj = j == i ? hq : layer_state(j, l);
      std::vector<std::int64_t> key = mul_sparse(hj, m.kmat);
      const std::int64_t delta = static_cast<std::int64_t>(i - j);
      std::int64_t score = 0;
      if (options_.pe_variant == PeVariant::KeySide) {
        for (int t = 0; t < spec_.dH; ++t)
          score += (key[static_cast<std::size_t>(t)] + pos(delta, t)) * q[static_cast<std::size_t>(t)];
      } else {
        for (int t = 0; t < spec_.dH; ++t)
          score += key[static_cast<std::size_t>(t)] * q[static_cast<std::size_t>(t)] +
                   pos(delta, t) * q[static_cast<std::size_t>(t)];
      }
      scores.push_back(score);
    }
    bool tie = false;
    std::size_t sel = hardmax_index(scores, &tie);
    if (tie) {
      ++trace_.tie_count;
      if (options_.strict_one_hot)
        throw NonOneHotAttention("attention tie at position " + std::to_string(i));
    }
    std::size_t jstar = lo + sel;
    const auto& hstar = jstar == i ? hq : layer_state(jstar, l);
    return {mul_sparse(hstar, m.vmat), static_cast<std::int64_t>(i - jstar)};
  }

  std::vector<std::int64_t> mul_sparse(const std::vector<std::int64_t>& h,
                                       const std::vector<SparseEntry>& entries) const {
    std::vector<std::int64_t> out(static_cast<std::size_t>(spec_.dH), 0);
    for (const auto& e : entries)
      out[static_cast<std::size_t>(e.col)] += h[static_cast<std::size_t>(e.row)] * e.value;
    return out;
  }

  std::int64_t pos(std::int64_t delta, int coord) const {
    if (delta <= spec_.window) return spec_.pe[static_cast<std::size_t>(delta)][static_cast<std::size_t>(coord)];
    return 0;  // beyond every s_r(n)-1 the sum in the definition is empty
  }

  const std::vector<std::int64_t>& layer_state(std::size_t position, int layer) const {
    return states_[position - 1][static_cast<std::size_t>(layer)];
  }

  // The exact output decode: h^L equals emb(next token); nearest embedding in
  // squared distance is uniquely the successor (see ledgered out_map note).
  Token decode(const std::vector<std::int64_t>& hL) const {
    std::size_t best = 0;
    std::int64_t best_dist = -1;
    bool tie = false;
    for (std::size_t v = 0; v < spec_.vocab_size(); ++v) {
      auto ev = embed(spec_.token_at(v), spec_);
      std::int64_t dist = 0;
      for (int j = 0; j < spec_.d; ++j) {
        std::int64_t diff = ev[static_cast<std::size_t>(j)] - hL[static_cast<std::size_t>(j)];
        dist += diff * diff;
      }
      if (best_dist < 0 || dist < best_dist) {
        best_dist = dist;
        best = v;
        tie = false;
      } else if (dist == best_dist) {
        tie = true;
      }
    }
    if (best_dist != 0 || tie)
      trace_.diagnostics.push_back("decode: final state is not an exact unique embedding");
    return spec_.token_at(best);
  }

  void check_locality(const std::vector<std::int64_t>& h, const std::vector<std::int64_t>& h0,
                      std::size_t position, int layer) {
    const int B = spec_.block();
    for (int j = 0; j < spec_.d; ++j) {
      if (h[static_cast<std::size_t>(j)] == h0[static_cast<std::size_t>(j)]) continue;
      int in_block = j % B;
      if (in_block >= spec_.c + 4 && in_block <= spec_.c + 6) continue;
      if (in_block == spec_.c + 8) continue;
      trace_.diagnostics.push_back("locality violated at position " + std::to_string(position) +
                                   " layer " + std::to_string(layer) + " dim " + std::to_string(j));
      return;
    }
  }

  void range_check(const std::vector<std::int64_t>& h, std::size_t position) {
    for (auto v : h)
      if (std::abs(v) > 4 * static_cast<std::int64_t>(spec_.d)) {
        trace_.diagnostics.push_back("value range exceeded at position " + std::to_string(position));
        return;
      }
  }

  const TransformerSpec& spec_;
  const TfRunOptions& options_;
  CotTrace& trace_;
  std::vector<std::vector<std::vector<std::int64_t>>> states_;  // [position][layer][dim]
};

// Runs the model on input x: the n prompt tokens are teacher-forced, then the
// model generates until a q_halt token or the fuel bound.
inline CotTrace tf_run(const TransformerSpec& spec, const std::string& x,
                       const TfRunOptions& options = {}) {
  if (static_cast<std::int64_t>(x.size()) != spec.n)
    throw ValidationError("input length " + std::to_string(x.size()) + " != model n = " +
                          std::to_string(spec.n));
  if (x.empty()) throw ValidationError("empty input");
  CotTrace trace;
  trace.prompt_len = static_cast<std::uint64_t>(x.size());
  TfRuntime rt(spec, options, trace);
  auto bits = spec.alphabet.encode_bits(x);
  if (options.fuel == 0) {
    // No generation: the prompt is recorded without running the model.
    for (std::size_t j = 1; j <= bits.size(); ++j) {
      Token t;
      t.symbols.assign(static_cast<std::size_t>(spec.K), spec.alphabet.blank());
      t.symbols[0] = bits[j - 1];
      t.state = spec.start_state;
      t.parity = static_cast<int>(j % 2);
      trace.tokens.push_back({t, true});
    }
    return trace;
  }
  for (std::size_t j = 1; j <= bits.size(); ++j) {
    Token t;
    t.symbols.assign(static_cast<std::size_t>(spec.K), spec.alphabet.blank());
    t.symbols[0] = bits[j - 1];
    t.state = spec.start_state;
    t.parity = static_cast<int>(j % 2);
    rt.append(t, true);
  }
  for (std::uint64_t g = 0; g < options.fuel; ++g) {
    Token next = rt.predict();
    rt.append(next, false);
    if (next.state == spec.halt_state) {
      trace.halted = true;
      break;
    }
  }
  return trace;
}

// --- equivalence ---------------------------------------------------------------

struct EquivalenceReport {
  bool match = false;
  std::size_t compared = 0;
  std::uint64_t first_divergence = 0;  // position, 0 = none
  bool cot_length_ok = false;
  std::string message;
};

// Position-by-position comparison of the queue machine log and the CoT trace:
// token i must carry (appended symbols, state, parity) of log record i, with
// exactly one CoT token per machine step.
inline EquivalenceReport trace_equivalence(const ExecutionLog& log, const CotTrace& trace) {
  EquivalenceReport rep;
  rep.cot_length_ok = trace.generated() == log.real_steps();
  std::size_t limit = std::min(trace.tokens.size(), log.records.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const Token& tok = trace.tokens[i].token;
    const LogRecord& rec = log.records[i];
    bool ok = tok.symbols == rec.appended && tok.state == rec.state &&
              tok.parity == rec.parity;
    if (!ok) {
      rep.first_divergence = rec.step;
      rep.compared = i;
      rep.message = "divergence at step " + std::to_string(rec.step);
      return rep;
    }
  }
  rep.compared = limit;
  rep.match = rep.cot_length_ok;
  rep.message = rep.match ? "match " + std::to_string(limit) + "/" + std::to_string(limit)
                          : "length mismatch: generated " + std::to_string(trace.generated()) +
                                " vs machine " + std::to_string(log.real_steps());
  return rep;
}

// Re-derives every pre-FFN vector reachable in a trace from the token
// sequence alone (embedding plus the fixed-offset attention writes) and
// checks net(h) + h = emb(next token) on each. Independent of the runtime's
// own layer computation.
inline std::vector<std::string> verify_ffn_on_trace(const TransformerSpec& spec,
                                                    const CotTrace& trace) {
  std::vector<std::string> out;
  const int B = spec.block();
  const std::size_t n = static_cast<std::size_t>(trace.prompt_len);
  if (n == 0) return out;
  const SparseNet net = SparseNet::from(spec.ffn);
  // Position i predicts token i+1; predictions before position n were
  // teacher-forced away.
  for (std::size_t i = n; i + 1 <= trace.tokens.size(); ++i) {
    const Token& cur = trace.tokens[i - 1].token;
    auto h = embed(cur, spec);
    for (int r = 0; r < spec.K; ++r) {
      const std::int64_t s_r = spec.queue_sizes[static_cast<std::size_t>(r)];
      const std::size_t jstar = static_cast<std::int64_t>(i) >= s_r ? i - static_cast<std::size_t>(s_r) + 1 : i;
      const Token& src = trace.tokens[jstar - 1].token;
      h[static_cast<std::size_t>(B * r + spec.c + 4 +
                                 spec.channel(src.symbols[static_cast<std::size_t>(r)]))] = 1;
      h[static_cast<std::size_t>(B * r + spec.c + 8)] = src.parity;
    }
    auto dv = net.eval(h);
    auto expect = embed(trace.tokens[i].token, spec);
    for (int j = 0; j < spec.d; ++j)
      if (dv[static_cast<std::size_t>(j)] + h[static_cast<std::size_t>(j)] !=
          expect[static_cast<std::size_t>(j)]) {
        out.push_back("reachable-vector mismatch at position " + std::to_string(i));
        if (out.size() > 20) return out;
        break;
      }
  }
  return out;
}

// --- sparsity probe --------------------------------------------------------------

struct ProbeRow {
  int layer = 0, head = 0;
  std::int64_t offset = 0;
  std::uint64_t count = 0;
};

struct ProbeResult {
  std::vector<ProbeRow> rows;
  bool pass = true;  // support within {0, s_r(n)-1} for every head
  double attended_per_step = 0.0;  // constant score mass: one position per head
};

inline ProbeResult attention_sparsity_probe(const CotTrace& trace, const TransformerSpec& spec) {
  ProbeResult res;
  std::map<std::tuple<int, int, std::int64_t>, std::uint64_t> hist;
  for (const auto& rec : trace.attn_offsets) ++hist[{rec.layer, rec.head, rec.offset}];
  for (const auto& [key, count] : hist) {
    auto [l, k, offset] = key;
    res.rows.push_back({l, k, offset, count});
    int r = k * spec.L + l;
    std::int64_t expected = spec.queue_sizes[static_cast<std::size_t>(r)] - 1;
    if (offset != 0 && offset != expected) res.pass = false;
  }
  res.attended_per_step = trace.attn_offsets.empty() ? 0.0 : 1.0;
  return res;
}

}  // namespace qf
