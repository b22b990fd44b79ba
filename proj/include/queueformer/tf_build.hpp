#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "queueformer/errors.hpp"
#include "queueformer/queue_machine.hpp"

namespace qf {

// A vocabulary token: K queue symbols, a state in c bits, and a position
// parity bit. V = Sigma^K x {0,1}^c x {0,1}.
struct Token {
  std::vector<Symbol> symbols;  // size K
  int state = 0;                // state index, encoded in c bits
  int parity = 0;
  bool operator==(const Token&) const = default;
};

struct SparseEntry {
  int row = 0, col = 0;
  int value = 0;
  bool operator==(const SparseEntry&) const = default;
};

// One attention head's K/Q/V matrices, stored sparse (they have 0, 1 and 4
// nonzeros respectively). Rows index the model dimension d, columns d/H.
struct HeadMatrices {
  std::vector<SparseEntry> kmat, qmat, vmat;
  bool operator==(const HeadMatrices&) const = default;
};

struct FfnLayer {
  bool relu = true;
  std::vector<std::vector<int>> weights;  // [unit][prev]
  std::vector<int> bias;                  // [unit]
  bool operator==(const FfnLayer&) const = default;
};

struct ReLUNet {
  std::vector<FfnLayer> layers;  // last layer is linear
  bool operator==(const ReLUNet&) const = default;

  std::vector<std::int64_t> eval(const std::vector<std::int64_t>& input) const {
    std::vector<std::int64_t> v = input;
    for (const auto& layer : layers) {
      std::vector<std::int64_t> u(layer.weights.size(), 0);
      for (std::size_t i = 0; i < layer.weights.size(); ++i) {
        std::int64_t acc = layer.bias[i];
        const auto& row = layer.weights[i];
        for (std::size_t j = 0; j < row.size(); ++j)
          if (row[j] != 0) acc += static_cast<std::int64_t>(row[j]) * v[j];
        u[i] = layer.relu && acc < 0 ? 0 : acc;
      }
      v = std::move(u);
    }
    return v;
  }
};

// The compiled constant bit-size model. All learnable weights are small
// integers; the positional table is architecture that varies with n.
struct TransformerSpec {
  int c = 1;          // state bit width
  int K = 1;          // queues = head-layer product
  int H = 1, L = 1;   // heads per layer, layers; H*L = K
  int d = 0;          // model dimension (c+9)*K
  int dH = 0;         // d/H
  std::int64_t n = 0;
  std::vector<std::int64_t> queue_sizes;
  std::int64_t window = 0;

  Alphabet alphabet = Alphabet::binary();
  std::vector<std::string> state_names;
  int start_state = 0, halt_state = 0;

  std::vector<std::vector<HeadMatrices>> heads;  // [layer][head]
  ReLUNet ffn;                                   // FF^{L-1}; earlier layers are zero
  std::vector<std::vector<int>> pe;              // [offset 0..window][dH]

  // --- token/vocabulary helpers ---------------------------------------------

  int block() const { return c + 9; }

  // Symbol channel for the 3-way one-hot, in the order (0, 1, blank).
  int channel(Symbol s) const {
    if (s == alphabet.zero()) return 0;
    if (s == alphabet.one()) return 1;
    return 2;
  }
  Symbol channel_symbol(int ch) const {
    return ch == 0 ? alphabet.zero() : (ch == 1 ? alphabet.one() : alphabet.blank());
  }

  std::size_t vocab_size() const {
    std::size_t v = 2;  // parity
    for (int i = 0; i < c; ++i) v *= 2;
    for (int r = 0; r < K; ++r) v *= 3;
    return v;
  }

  std::size_t token_index(const Token& t) const {
    std::size_t idx = 0;
    for (int r = 0; r < K; ++r) idx = idx * 3 + static_cast<std::size_t>(channel(t.symbols[static_cast<std::size_t>(r)]));
    for (int b = c - 1; b >= 0; --b) idx = idx * 2 + static_cast<std::size_t>((t.state >> b) & 1);
    return idx * 2 + static_cast<std::size_t>(t.parity);
  }

  Token token_at(std::size_t idx) const {
    Token t;
    t.parity = static_cast<int>(idx % 2);
    idx /= 2;
    t.state = 0;
    for (int b = 0; b < c; ++b) {
      t.state |= static_cast<int>(idx % 2) << b;
      idx /= 2;
    }
    t.symbols.assign(static_cast<std::size_t>(K), alphabet.blank());
    for (int r = K - 1; r >= 0; --r) {
      t.symbols[static_cast<std::size_t>(r)] = channel_symbol(static_cast<int>(idx % 3));
      idx /= 3;
    }
    return t;
  }

  // --- audit ------------------------------------------------------------------

  // Number of learnable scalars: embedding table, per-head K/Q/V (dense
  // shapes), per-layer W and b, and the feed-forward net. The positional
  // table and output decode are architecture, not parameters.
  std::uint64_t parameter_count() const {
    std::uint64_t count = static_cast<std::uint64_t>(vocab_size()) * static_cast<std::uint64_t>(d);
    count += static_cast<std::uint64_t>(L) * static_cast<std::uint64_t>(H) * 3ull *
             static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(dH);
    count += static_cast<std::uint64_t>(L) *
             (static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(d));
    for (const auto& layer : ffn.layers) {
      for (const auto& row : layer.weights) count += row.size();
      count += layer.bias.size();
    }
    return count;
  }

  // Returns the extreme learnable weight values (for the [-2,2] audit).
  std::pair<int, int> weight_range() const {
    int lo = 0, hi = 1;  // identity W^l and the 0/1 embedding table
    auto note = [&](int v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    };
    for (const auto& layer_heads : heads)
      for (const auto& h : layer_heads) {
        for (const auto& e : h.kmat) note(e.value);
        for (const auto& e : h.qmat) note(e.value);
        for (const auto& e : h.vmat) note(e.value);
      }
    for (const auto& layer : ffn.layers) {
      for (const auto& row : layer.weights)
        for (int v : row) note(v);
      for (int v : layer.bias) note(v);
    }
    return {lo, hi};
  }
};

// --- embed ---------------------------------------------------------------------

// Block r of the embedding: (1, one-hot(sigma_r), q bits, 0,0,0, p, 0).
inline std::vector<std::int64_t> embed(const Token& t, const TransformerSpec& spec) {
  const int B = spec.block();
  std::vector<std::int64_t> v(static_cast<std::size_t>(spec.d), 0);
  for (int r = 0; r < spec.K; ++r) {
    const int base = B * r;
    v[static_cast<std::size_t>(base)] = 1;
    v[static_cast<std::size_t>(base + 1 + spec.channel(t.symbols[static_cast<std::size_t>(r)]))] = 1;
    for (int b = 0; b < spec.c; ++b)
      v[static_cast<std::size_t>(base + 4 + b)] = (t.state >> b) & 1;
    v[static_cast<std::size_t>(base + spec.c + 7)] = t.parity;
  }
  return v;
}

// --- positional encoding --------------------------------------------------------

// pos(0) = all-ones; pos(D > 0) = 2 * sum of e_r over queues with s_r(n)-1 = D.
inline std::vector<std::vector<int>> build_pe(const std::vector<std::int64_t>& queue_sizes,
                                              int dH, std::int64_t window) {
  std::vector<std::vector<int>> pe(static_cast<std::size_t>(window + 1),
                                   std::vector<int>(static_cast<std::size_t>(dH), 0));
  for (int j = 0; j < dH; ++j) pe[0][static_cast<std::size_t>(j)] = 1;
  for (std::int64_t delta = 1; delta <= window; ++delta)
    for (std::size_t r = 0; r < queue_sizes.size(); ++r)
      if (queue_sizes[r] - 1 == delta) pe[static_cast<std::size_t>(delta)][r] = 2;
  return pe;
}

// --- attention matrices ----------------------------------------------------------

// Head (layer l, head k) serves queue r = k*L + l. K is all zeros; Q has one
// unit entry selecting coordinate r; V routes the source block-r symbol
// one-hot and parity into block l of the head output (which the head
// concatenation places back at block r of the residual stream).
inline HeadMatrices build_attention_matrices(int r, int l, int k, int c, int K) {
  const int B = c + 9;
  const int d = B * K;
  (void)k;
  if (r < 0 || r >= K || l < 0 || B * r + c + 8 >= d)
    throw IndexOutOfRange("attention matrix entry out of range for r = " + std::to_string(r));
  HeadMatrices m;
  m.qmat.push_back({B * r, r, 1});
  for (int ch = 0; ch < 3; ++ch) m.vmat.push_back({B * r + 1 + ch, B * l + c + 4 + ch, 1});
  m.vmat.push_back({B * r + c + 7, B * l + c + 8, 1});
  return m;
}

// --- feed-forward compilation ------------------------------------------------------

namespace ffn_detail {

// An affine combination over the previous layer's units.
struct Combo {
  std::map<int, int> coeff;
  int constant = 0;
};

inline Combo unit(int idx) {
  Combo c;
  c.coeff[idx] = 1;
  return c;
}

inline Combo negated(int idx) {  // 1 - x
  Combo c;
  c.coeff[idx] = -1;
  c.constant = 1;
  return c;
}

}  // namespace ffn_detail

// Compiles the transition function into an integer ReLU net with
// net(h) + h = emb(next token) on every valid pre-FFN vector. Structure:
// per-queue gated symbol channels (one-sided rectified parity differences),
// conjunction trees of fan-in <= 3 (so every weight and bias stays in
// [-2, 2]), and a linear output layer summing detector * emb(successor)
// minus an exact identity pass-through.
inline ReLUNet compile_delta_to_ffn(const QueueTMSpec& machine, const TransformerSpec& spec) {
  using ffn_detail::Combo;
  const int K = spec.K, c = spec.c, d = spec.d, B = spec.block();
  if (static_cast<std::size_t>(1) << c < machine.states.size())
    throw EncodingOverflow("2^c < |Q| (c = " + std::to_string(c) + ")");

  ReLUNet net;

  // Hidden layer 1: z gates, q/p pass-throughs, identity pass-through.
  FfnLayer l1;
  l1.relu = true;
  auto add_unit = [&](std::vector<std::pair<int, int>> w, int bias) {
    std::vector<int> row(static_cast<std::size_t>(d), 0);
    for (auto [j, v] : w) row[static_cast<std::size_t>(j)] = v;
    l1.weights.push_back(std::move(row));
    l1.bias.push_back(bias);
    return static_cast<int>(l1.weights.size()) - 1;
  };
  const int p_own = c + 7;  // block 0 parity slot
  std::vector<int> za0(K), zb0(K), za1(K), zb1(K);
  for (int r = 0; r < K; ++r) {
    const int att0 = B * r + c + 4, att1 = B * r + c + 5, p_att = B * r + c + 8;
    za0[r] = add_unit({{att0, 1}, {p_own, 1}, {p_att, -1}}, -1);
    zb0[r] = add_unit({{att0, 1}, {p_own, -1}, {p_att, 1}}, -1);
    za1[r] = add_unit({{att1, 1}, {p_own, 1}, {p_att, -1}}, -1);
    zb1[r] = add_unit({{att1, 1}, {p_own, -1}, {p_att, 1}}, -1);
  }
  std::vector<int> qbit(static_cast<std::size_t>(c));
  for (int b = 0; b < c; ++b) qbit[static_cast<std::size_t>(b)] = add_unit({{4 + b, 1}}, 0);
  const int pbit = add_unit({{p_own, 1}}, 0);
  std::vector<int> id(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) id[static_cast<std::size_t>(j)] = add_unit({{j, 1}}, 0);
  net.layers.push_back(std::move(l1));

  // Literal combos over layer-1 units.
  auto z_combo = [&](int r, int ch) {
    Combo cb;
    if (ch == 0) {
      cb.coeff[za0[r]] = 1;
      cb.coeff[zb0[r]] = 1;
    } else if (ch == 1) {
      cb.coeff[za1[r]] = 1;
      cb.coeff[zb1[r]] = 1;
    } else {  // blank: 1 - z0 - z1
      cb.coeff[za0[r]] = -1;
      cb.coeff[zb0[r]] = -1;
      cb.coeff[za1[r]] = -1;
      cb.coeff[zb1[r]] = -1;
      cb.constant = 1;
    }
    return cb;
  };

  // Enumerate detector configurations: effective pops x non-halt state x parity.
  struct Detector {
    std::vector<Combo> terms;  // pending conjunction terms
    Token next;                // delta successor token
  };
  std::vector<Detector> detectors;
  const int n_states = static_cast<int>(machine.states.size());
  std::vector<int> channels(static_cast<std::size_t>(K), 0);
  while (true) {
    for (int q = 0; q < n_states; ++q) {
      if (q == machine.halt_state) continue;
      for (int p = 0; p < 2; ++p) {
        Detector det;
        std::vector<Symbol> pops(static_cast<std::size_t>(K));
        for (int r = 0; r < K; ++r) {
          pops[static_cast<std::size_t>(r)] = spec.channel_symbol(channels[static_cast<std::size_t>(r)]);
          det.terms.push_back(z_combo(r, channels[static_cast<std::size_t>(r)]));
        }
        for (int b = 0; b < c; ++b)
          det.terms.push_back(((q >> b) & 1) ? ffn_detail::unit(qbit[static_cast<std::size_t>(b)])
                                             : ffn_detail::negated(qbit[static_cast<std::size_t>(b)]));
        det.terms.push_back(p ? ffn_detail::unit(pbit) : ffn_detail::negated(pbit));
        const QueueAction& act = machine.transition(q, pops);
        det.next.symbols = act.appends;
        det.next.state = act.next_state;
        det.next.parity = 1 - p;
        detectors.push_back(std::move(det));
      }
    }
    int r = K - 1;
    for (; r >= 0; --r) {
      if (++channels[static_cast<std::size_t>(r)] < 3) break;
      channels[static_cast<std::size_t>(r)] = 0;
    }
    if (r < 0) break;
  }

  // Conjunction stages with fan-in <= 3 until each detector is one unit.
  while (true) {
    bool done = true;
    for (const auto& det : detectors)
      if (det.terms.size() > 1) done = false;
    if (done) break;
    FfnLayer layer;
    layer.relu = true;
    const int prev_size = static_cast<int>(net.layers.back().weights.size());
    auto add = [&](const std::vector<Combo>& group) {
      std::vector<int> row(static_cast<std::size_t>(prev_size), 0);
      int bias = -(static_cast<int>(group.size()) - 1);
      for (const auto& cb : group) {
        for (auto [j, v] : cb.coeff) row[static_cast<std::size_t>(j)] += v;
        bias += cb.constant;
      }
      layer.weights.push_back(std::move(row));
      layer.bias.push_back(bias);
      return static_cast<int>(layer.weights.size()) - 1;
    };
    for (auto& det : detectors) {
      std::vector<Combo> next_terms;
      for (std::size_t i = 0; i < det.terms.size(); i += 3) {
        std::vector<Combo> group(det.terms.begin() + static_cast<std::ptrdiff_t>(i),
                                 det.terms.begin() +
                                     static_cast<std::ptrdiff_t>(std::min(i + 3, det.terms.size())));
        next_terms.push_back(ffn_detail::unit(add(group)));
      }
      det.terms = std::move(next_terms);
    }
    // Identity chain continues through every hidden layer.
    std::vector<int> new_id(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      std::vector<int> row(static_cast<std::size_t>(prev_size), 0);
      row[static_cast<std::size_t>(id[static_cast<std::size_t>(j)])] = 1;
      layer.weights.push_back(std::move(row));
      layer.bias.push_back(0);
      new_id[static_cast<std::size_t>(j)] = static_cast<int>(layer.weights.size()) - 1;
    }
    id = std::move(new_id);
    net.layers.push_back(std::move(layer));
  }

  // Linear output: sum of detector * emb(next) minus the identity.
  FfnLayer out;
  out.relu = false;
  const int prev_size = static_cast<int>(net.layers.back().weights.size());
  out.weights.assign(static_cast<std::size_t>(d), std::vector<int>(static_cast<std::size_t>(prev_size), 0));
  out.bias.assign(static_cast<std::size_t>(d), 0);
  for (const auto& det : detectors) {
    const Combo& term = det.terms.front();
    auto ev = embed(det.next, spec);
    for (int j = 0; j < d; ++j) {
      if (ev[static_cast<std::size_t>(j)] == 0) continue;
      for (auto [u, v] : term.coeff)
        out.weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)] +=
            v * static_cast<int>(ev[static_cast<std::size_t>(j)]);
      out.bias[static_cast<std::size_t>(j)] += term.constant * static_cast<int>(ev[static_cast<std::size_t>(j)]);
    }
  }
  for (int j = 0; j < d; ++j)
    out.weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(id[static_cast<std::size_t>(j)])] -= 1;
  net.layers.push_back(std::move(out));
  return net;
}

// --- whole-model assembly ------------------------------------------------------------

struct BuildOptions {
  int heads = 1;   // H; default factorization L = K, H = 1
  int layers = 0;  // L; 0 = derive from K/H
  std::int64_t window_override = 0;  // 0 = max_r s_r(n)
};

inline TransformerSpec build_transformer(const QueueTMSpec& machine, std::int64_t n,
                                         const BuildOptions& options = {}) {
  {
    auto violations = validate_spec(machine);
    if (!violations.empty())
      throw ValidationError("invalid queue machine: " + violations.front());
  }
  if (!machine.alphabet.is_binary_blank())
    throw ValidationError("transformer construction requires the {0,1,_} alphabet");
  if (machine.lookbehind != 1)
    throw ValidationError("transformer construction requires lookbehind = 1");

  TransformerSpec spec;
  spec.K = machine.num_queues;
  spec.H = options.heads;
  spec.L = options.layers > 0 ? options.layers : spec.K / std::max(1, options.heads);
  if (spec.H * spec.L != spec.K)
    throw ValidationError("head-layer product H*L = " + std::to_string(spec.H * spec.L) +
                          " != K = " + std::to_string(spec.K));
  // c is padded upward so that 2^c >= |Q| and c+9 >= H.
  int c = 1;
  while ((std::size_t{1} << c) < machine.states.size()) ++c;
  c = std::max(c, spec.H - 9);
  spec.c = c;
  if (spec.c + 9 < spec.H)
    throw DimensionTooSmall("c+9 < H");
  spec.d = (c + 9) * spec.K;
  spec.dH = spec.d / spec.H;
  spec.n = n;
  spec.alphabet = machine.alphabet;
  spec.state_names = machine.states;
  spec.start_state = machine.start_state;
  spec.halt_state = machine.halt_state;

  for (int r = 0; r < spec.K; ++r) {
    std::int64_t s = machine.sizes[static_cast<std::size_t>(r)].eval(n);
    if (s <= 0 || s % 2 != 0)
      throw ValidationError("odd queue size s_" + std::to_string(r) + " = " + std::to_string(s));
    spec.queue_sizes.push_back(s);
  }
  spec.window = options.window_override > 0
                    ? options.window_override
                    : *std::max_element(spec.queue_sizes.begin(), spec.queue_sizes.end());

  spec.heads.resize(static_cast<std::size_t>(spec.L));
  for (int l = 0; l < spec.L; ++l) {
    for (int k = 0; k < spec.H; ++k) {
      int r = k * spec.L + l;
      spec.heads[static_cast<std::size_t>(l)].push_back(
          build_attention_matrices(r, l, k, spec.c, spec.K));
    }
  }
  spec.pe = build_pe(spec.queue_sizes, spec.dH, spec.window);
  spec.ffn = compile_delta_to_ffn(machine, spec);
  return spec;
}

// Sparse view of a ReLU net for enumeration-heavy checks; most weights are
// zero by construction.
struct SparseNet {
  struct Unit {
    std::vector<std::pair<int, int>> terms;  // (prev index, weight)
    int bias = 0;
  };
  struct Layer {
    bool relu = true;
    std::vector<Unit> units;
  };
  std::vector<Layer> layers;

  static SparseNet from(const ReLUNet& net) {
    SparseNet s;
    for (const auto& layer : net.layers) {
      Layer l;
      l.relu = layer.relu;
      for (std::size_t i = 0; i < layer.weights.size(); ++i) {
        Unit u;
        u.bias = layer.bias[i];
        const auto& row = layer.weights[i];
        for (std::size_t j = 0; j < row.size(); ++j)
          if (row[j] != 0) u.terms.emplace_back(static_cast<int>(j), row[j]);
        l.units.push_back(std::move(u));
      }
      s.layers.push_back(std::move(l));
    }
    return s;
  }

  std::vector<std::int64_t> eval(const std::vector<std::int64_t>& input) const {
    std::vector<std::int64_t> v = input, u;
    for (const auto& layer : layers) {
      u.assign(layer.units.size(), 0);
      for (std::size_t i = 0; i < layer.units.size(); ++i) {
        std::int64_t acc = layer.units[i].bias;
        for (auto [j, w] : layer.units[i].terms) acc += w * v[static_cast<std::size_t>(j)];
        u[i] = layer.relu && acc < 0 ? 0 : acc;
      }
      v.swap(u);
    }
    return v;
  }
};

// --- exactness audit ------------------------------------------------------------------

struct FfnMismatch {
  Token current;
  std::vector<int> att_channels;  // per queue: attended symbol channel
  std::vector<int> att_parity;
  std::string what;
};

// Enumerates valid pre-FFN vectors (full enumeration when the count is within
// `limit`, otherwise a seeded sample of `samples`) and checks
// net(h) + h = emb(delta successor) exactly.
inline std::vector<FfnMismatch> verify_ffn_table(const QueueTMSpec& machine,
                                                 const TransformerSpec& spec,
                                                 std::size_t limit = 1'000'000,
                                                 std::size_t samples = 100'000,
                                                 std::uint64_t seed = 0) {
  std::vector<FfnMismatch> out;
  const int K = spec.K, B = spec.block();
  const int n_states = static_cast<int>(machine.states.size());

  // valid combinations: own symbols 3^K, attended (symbol,parity) 6^K,
  // states |Q|-1, parity 2.
  std::uint64_t total = 2ull * static_cast<std::uint64_t>(n_states - 1);
  for (int r = 0; r < K; ++r) {
    if (total > limit * 18ull) break;
    total *= 18ull;  // 3 own channels * 3 attended channels * 2 attended parities
  }
  const bool full = total <= limit;

  std::mt19937_64 rng(seed);
  const SparseNet net = SparseNet::from(spec.ffn);
  auto run_case = [&](const std::vector<int>& own, const std::vector<int>& att,
                      const std::vector<int>& attp, int q, int p) {
    Token cur;
    cur.state = q;
    cur.parity = p;
    for (int r = 0; r < K; ++r) cur.symbols.push_back(spec.channel_symbol(own[static_cast<std::size_t>(r)]));
    auto h = embed(cur, spec);
    std::vector<Symbol> pops(static_cast<std::size_t>(K));
    for (int r = 0; r < K; ++r) {
      h[static_cast<std::size_t>(B * r + spec.c + 4 + att[static_cast<std::size_t>(r)])] = 1;
      h[static_cast<std::size_t>(B * r + spec.c + 8)] = attp[static_cast<std::size_t>(r)];
      pops[static_cast<std::size_t>(r)] =
          attp[static_cast<std::size_t>(r)] == p
              ? spec.alphabet.blank()
              : spec.channel_symbol(att[static_cast<std::size_t>(r)]);
    }
    const QueueAction& act = machine.transition(q, pops);
    Token next{act.appends, act.next_state, 1 - p};
    auto expect = embed(next, spec);
    auto delta_v = net.eval(h);
    bool ok = true;
    for (int j = 0; j < spec.d; ++j)
      if (delta_v[static_cast<std::size_t>(j)] + h[static_cast<std::size_t>(j)] !=
          expect[static_cast<std::size_t>(j)])
        ok = false;
    if (!ok) {
      FfnMismatch m;
      m.current = cur;
      m.att_channels = att;
      m.att_parity = attp;
      m.what = "net(h)+h != emb(successor) in state '" +
               machine.states[static_cast<std::size_t>(q)] + "'";
      out.push_back(std::move(m));
    }
  };

  if (full) {
    std::vector<int> own(static_cast<std::size_t>(K), 0), att(static_cast<std::size_t>(K), 0),
        attp(static_cast<std::size_t>(K), 0);
    // odometer over (own, att, attp) tuples
    while (true) {
      for (int q = 0; q < n_states; ++q) {
        if (q == machine.halt_state) continue;
        for (int p = 0; p < 2; ++p) run_case(own, att, attp, q, p);
      }
      int pos = 3 * K - 1;
      for (; pos >= 0; --pos) {
        int r = pos % K;
        int which = pos / K;
        auto& slot = which == 0 ? own[static_cast<std::size_t>(r)]
                     : which == 1 ? att[static_cast<std::size_t>(r)]
                                  : attp[static_cast<std::size_t>(r)];
        int radix = which == 2 ? 2 : 3;
        if (++slot < radix) break;
        slot = 0;
      }
      if (pos < 0) break;
      if (out.size() > 100) return out;
    }
  } else {
    for (std::size_t i = 0; i < samples; ++i) {
      std::vector<int> own(static_cast<std::size_t>(K)), att(static_cast<std::size_t>(K)),
          attp(static_cast<std::size_t>(K));
      for (int r = 0; r < K; ++r) {
        own[static_cast<std::size_t>(r)] = static_cast<int>(rng() % 3);
        att[static_cast<std::size_t>(r)] = static_cast<int>(rng() % 3);
        attp[static_cast<std::size_t>(r)] = static_cast<int>(rng() % 2);
      }
      int q;
      do {
        q = static_cast<int>(rng() % static_cast<std::uint64_t>(n_states));
      } while (q == machine.halt_state);
      run_case(own, att, attp, q, static_cast<int>(rng() % 2));
      if (out.size() > 100) return out;
    }
  }
  return out;
}

}  // namespace qf
