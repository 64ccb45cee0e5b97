#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclab/conflict.hpp"
#include "qclab/rng.hpp"

namespace qclab {

// Trees over composed inputs address coordinates globally: block i of t,
// within-block coordinate j of m, global index (i-1)*m + j, all 1-based.

struct BlockCoord {
  int block;
  int coord;
};

inline BlockCoord block_coord(int global_index, int m) {
  return {(global_index - 1) / m + 1, (global_index - 1) % m + 1};
}

// ---------------------------------------------------------------------------
// BITSAMPLER

struct BitSample {
  int bit = 0;
  bool queried = false;
};

/// Answers a simulated query with the conditional distribution of the hidden
/// side, touching the hidden bit only inside the conflict band.  Realized as
/// an exact three-way categorical draw over {min(p0,p1), |p0-p1|,
/// 1-max(p0,p1)}; no real number is materialized.  Inside the band the
/// returned bit is 0 exactly when p_z is the larger probability.
inline BitSample bitsampler(const Rat& p0, const Rat& p1,
                            const std::function<int()>& z_bit, Rng& rng) {
  if (p0 < 0 || p0 > 1 || p1 < 0 || p1 > 1)
    throw DomainError("bitsampler probabilities outside [0,1]");
  Rat lo = rat_min(p0, p1);
  Rat hi = rat_max(p0, p1);
  size_t band = rng.categorical({lo, hi - lo, 1 - hi});
  if (band == 0) return {0, false};
  if (band == 2) return {1, false};
  int z = z_bit();
  if (z != 0 && z != 1) throw DomainError("hidden bit accessor returned a non-bit");
  const Rat& pz = z == 0 ? p0 : p1;
  return {pz == hi ? 0 : 1, true};
}

// ---------------------------------------------------------------------------
// The query process

struct ProcessState {
  uint64_t queried = 0;          // bitmask over blocks, bit i-1 for block i
  std::vector<int64_t> counts;   // per-block simulated queries before the flip

  bool is_queried(int block) const { return queried >> (block - 1) & 1; }
};

struct TraceStep {
  int node;
  int block;
  bool queried_flag;  // whether this step queried the hidden bit
  int branch;
};

struct RunResult {
  int leaf = -1;       // -1 when stopped by a query budget
  bool stopped = false;
  ProcessState state;
  std::vector<TraceStep> trace;  // filled only when requested
};

namespace detail {

struct BlockTrack {
  bool queried = false;
  std::optional<Dist> mu0, mu1;  // conditioned on the block subcube so far
  std::optional<Dist> muz;       // after the flip, only the true side
};

inline Dist cond_bit(const Dist& d, int j, int b) {
  return d.conditioned(Subcube::full(d.arity()).fix(j, b));
}

}  // namespace detail

/// One trajectory of the query process: per-block pair draws from the
/// mixture, bit answers via BITSAMPLER at unqueried blocks, direct
/// conditional sampling at queried blocks, and exact per-block counting.
inline RunResult run_process(const DecisionTree& b, const PairMixture& q,
                             const std::string& z, Rng& rng,
                             std::optional<int64_t> query_budget = std::nullopt,
                             bool want_trace = false) {
  check_bits(z);
  const int t = static_cast<int>(z.size());
  if (t == 0 || t > 64) throw ArityError("block count out of range");
  if (b.arity() % t != 0) throw ArityError("tree arity not divisible by block count");
  const int m = b.arity() / t;
  if (q.arity() != m) throw ArityError("mixture arity != block size");

  std::vector<Rat> mix_weights;
  for (const auto& [w, p] : q.entries()) mix_weights.push_back(w);
  std::vector<detail::BlockTrack> blocks(static_cast<size_t>(t));
  for (auto& blk : blocks) {
    const auto& pair = q.entries()[rng.categorical(mix_weights)].second;
    blk.mu0 = pair.mu0;
    blk.mu1 = pair.mu1;
  }

  RunResult out;
  out.state.counts.assign(static_cast<size_t>(t), 0);
  int64_t queries_made = 0;
  int v = b.root();
  while (!b.is_leaf(v)) {
    auto [i, j] = block_coord(b.query_at(v), m);
    auto& blk = blocks[static_cast<size_t>(i - 1)];
    int bit;
    bool flipped = false;
    if (!blk.queried) {
      Rat p0 = blk.mu0->prob_bit0(j);
      Rat p1 = blk.mu1->prob_bit0(j);
      BitSample s = bitsampler(p0, p1, [&] { return bit_at(z, i); }, rng);
      if (s.queried) {
        if (query_budget && queries_made >= *query_budget) {
          out.stopped = true;
          return out;
        }
        ++queries_made;
        blk.queried = true;
        flipped = true;
        out.state.queried |= uint64_t{1} << (i - 1);
        blk.muz = bit_at(z, i) == 0 ? blk.mu0 : blk.mu1;
        blk.mu0.reset();
        blk.mu1.reset();
        blk.muz = detail::cond_bit(*blk.muz, j, s.bit);
      } else {
        blk.mu0 = detail::cond_bit(*blk.mu0, j, s.bit);
        blk.mu1 = detail::cond_bit(*blk.mu1, j, s.bit);
      }
      ++out.state.counts[static_cast<size_t>(i - 1)];
      bit = s.bit;
    } else {
      Rat pb0 = blk.muz->prob_bit0(j);
      bit = rng.bernoulli(pb0) ? 0 : 1;
      blk.muz = detail::cond_bit(*blk.muz, j, bit);
    }
    if (want_trace) out.trace.push_back({v, i, flipped, bit});
    v = b.child(v, bit);
  }
  out.leaf = v;
  return out;
}

// ---------------------------------------------------------------------------
// Exact evaluation of the process

struct ProcessChart {
  std::map<std::pair<int, uint64_t>, Rat> state_probs;  // (node, queried mask)
  std::map<int, Rat> node_probs;                        // marginal over masks
  std::map<int, Rat> leaf_dist;
  std::vector<Rat> expected_counts;  // E[N_i] per block
  std::vector<Rat> query_probs;      // probability block i's bit gets queried
  Rat stop_prob = 0;                 // only nonzero under a query budget
};

inline std::vector<int> touched_blocks(const DecisionTree& b, int t) {
  const int m = b.arity() / t;
  std::vector<bool> seen(static_cast<size_t>(t) + 1, false);
  b.walk(b.root(), 1, [&](int v, int) {
    if (!b.is_leaf(v)) seen[static_cast<size_t>(block_coord(b.query_at(v), m).block)] = true;
  });
  std::vector<int> out;
  for (int i = 1; i <= t; ++i)
    if (seen[static_cast<size_t>(i)]) out.push_back(i);
  return out;
}

/// Exact distribution of the query process on z: state probabilities per
/// (node, queried set), the leaf distribution, expected per-block counts and
/// per-block query probabilities.  The expectation over the mixture is taken
/// exactly, tuple by tuple over the blocks the tree touches.
inline ProcessChart exact_process_chart(const DecisionTree& b, const PairMixture& q,
                                        const std::string& z,
                                        std::optional<int64_t> query_budget = std::nullopt,
                                        size_t state_cap = 1'000'000) {
  check_bits(z);
  const int t = static_cast<int>(z.size());
  if (t == 0 || t > 64) throw ArityError("block count out of range");
  if (b.arity() % t != 0) throw ArityError("tree arity not divisible by block count");
  const int m = b.arity() / t;
  if (q.arity() != m) throw ArityError("mixture arity != block size");

  ProcessChart chart;
  chart.expected_counts.assign(static_cast<size_t>(t), Rat(0));
  chart.query_probs.assign(static_cast<size_t>(t), Rat(0));

  auto blocks = touched_blocks(b, t);
  size_t steps = 0;

  struct Track {
    bool queried = false;
    std::optional<Dist> mu0, mu1, muz;
  };

  auto rec = [&](auto&& self, int v, uint64_t mask, const Rat& p,
                 std::vector<Track>& tracks) -> void {
    if (++steps > state_cap) throw BudgetError("process chart state cap exceeded");
    chart.state_probs[{v, mask}] += p;
    chart.node_probs[v] += p;
    if (b.is_leaf(v)) {
      chart.leaf_dist[v] += p;
      return;
    }
    auto [i, j] = block_coord(b.query_at(v), m);
    Track& blk = tracks[static_cast<size_t>(i - 1)];
    if (!blk.queried) {
      Rat p0 = blk.mu0->prob_bit0(j);
      Rat p1 = blk.mu1->prob_bit0(j);
      Rat left = rat_min(p0, p1);
      Rat band = rat_abs(p0 - p1);
      Rat right = 1 - rat_max(p0, p1);
      bool stops = band > 0 && query_budget &&
                   static_cast<int64_t>(std::popcount(mask)) >= *query_budget;
      // A step cut off by the budget never finishes its simulated query.
      chart.expected_counts[static_cast<size_t>(i - 1)] +=
          stops ? p * (1 - band) : p;
      if (left > 0) {
        Track saved = blk;
        blk.mu0 = detail::cond_bit(*blk.mu0, j, 0);
        blk.mu1 = detail::cond_bit(*blk.mu1, j, 0);
        self(self, b.child(v, 0), mask, p * left, tracks);
        blk = saved;
      }
      if (right > 0) {
        Track saved = blk;
        blk.mu0 = detail::cond_bit(*blk.mu0, j, 1);
        blk.mu1 = detail::cond_bit(*blk.mu1, j, 1);
        self(self, b.child(v, 1), mask, p * right, tracks);
        blk = saved;
      }
      if (band > 0) {
        if (stops) {
          chart.stop_prob += p * band;
        } else {
          chart.query_probs[static_cast<size_t>(i - 1)] += p * band;
          const Rat& pz = bit_at(z, i) == 0 ? p0 : p1;
          int bit = pz == rat_max(p0, p1) ? 0 : 1;
          Track saved = blk;
          blk.queried = true;
          blk.muz = detail::cond_bit(bit_at(z, i) == 0 ? *blk.mu0 : *blk.mu1, j, bit);
          blk.mu0.reset();
          blk.mu1.reset();
          self(self, b.child(v, bit), mask | (uint64_t{1} << (i - 1)), p * band,
               tracks);
          blk = saved;
        }
      }
    } else {
      Rat pb0 = blk.muz->prob_bit0(j);
      for (int bit : {0, 1}) {
        Rat pb = bit == 0 ? pb0 : 1 - pb0;
        if (pb == 0) continue;
        Track saved = blk;
        blk.muz = detail::cond_bit(*blk.muz, j, bit);
        self(self, b.child(v, bit), mask, p * pb, tracks);
        blk = saved;
      }
    }
  };

  // Enumerate mixture tuples over touched blocks only.
  const auto& entries = q.entries();
  auto tuples = [&](auto&& self, size_t pos, const Rat& w,
                    std::vector<Track>& tracks) -> void {
    if (pos == blocks.size()) {
      rec(rec, b.root(), 0, w, tracks);
      return;
    }
    for (const auto& [ew, pair] : entries) {
      Track& blk = tracks[static_cast<size_t>(blocks[pos] - 1)];
      blk = Track{false, pair.mu0, pair.mu1, std::nullopt};
      self(self, pos + 1, w * ew, tracks);
    }
  };
  std::vector<Track> tracks(static_cast<size_t>(t));
  tuples(tuples, 0, Rat(1), tracks);
  return chart;
}

/// Definitional oracle: enumerates the support of the composed-input
/// distribution (pair tuple per block, block strings from the true side) and
/// pushes every atom through the tree.  Returns reach probabilities per node.
inline std::map<int, Rat> gamma_pushforward(const DecisionTree& b,
                                            const PairMixture& q,
                                            const std::string& z) {
  check_bits(z);
  const int t = static_cast<int>(z.size());
  if (t == 0) throw ArityError("empty z");
  if (b.arity() % t != 0) throw ArityError("tree arity not divisible by block count");
  const int m = b.arity() / t;
  if (q.arity() != m) throw ArityError("mixture arity != block size");

  std::map<int, Rat> node_probs;
  auto blocks = touched_blocks(b, t);
  std::string x(static_cast<size_t>(t * m), '0');

  auto atoms = [&](auto&& self, size_t pos, const Rat& w) -> void {
    if (pos == blocks.size()) {
      int v = b.root();
      node_probs[v] += w;
      while (!b.is_leaf(v)) {
        v = b.child(v, bit_at(x, b.query_at(v)));
        node_probs[v] += w;
      }
      return;
    }
    int i = blocks[pos];
    for (const auto& [ew, pair] : q.entries()) {
      const Dist& side = bit_at(z, i) == 0 ? pair.mu0 : pair.mu1;
      for (const auto& [xs, xw] : side.weights()) {
        x.replace(static_cast<size_t>(i - 1) * m, static_cast<size_t>(m), xs);
        self(self, pos + 1, w * ew * xw);
      }
    }
  };
  atoms(atoms, 0, Rat(1));
  return node_probs;
}

/// Samples a composed input: independent pair draw per block, block i from
/// the side selected by z_i.
inline std::string sample_gamma(const std::string& z, const PairMixture& q,
                                Rng& rng) {
  check_bits(z);
  const int t = static_cast<int>(z.size());
  const int m = q.arity();
  std::vector<Rat> mix_weights;
  for (const auto& [w, p] : q.entries()) mix_weights.push_back(w);
  std::string x;
  x.reserve(static_cast<size_t>(t) * m);
  for (int i = 1; i <= t; ++i) {
    const auto& pair = q.entries()[rng.categorical(mix_weights)].second;
    const Dist& side = bit_at(z, i) == 0 ? pair.mu0 : pair.mu1;
    std::vector<Rat> ws;
    std::vector<const std::string*> pts;
    for (const auto& [xs, w] : side.weights()) {
      pts.push_back(&xs);
      ws.push_back(w);
    }
    x += *pts[rng.categorical(ws)];
  }
  return x;
}

// ---------------------------------------------------------------------------
// The composed algorithm

/// Runs the query process down a labeled tree for the composed problem and
/// returns the reached leaf's label; optionally truncated after a fixed
/// number of hidden-bit queries, with a fallback output.
struct RandomizedAlgorithm {
  DecisionTree tree;  // labeled tree over t blocks of m bits
  PairMixture mixture;
  std::optional<int64_t> query_budget;
  std::string fallback;

  int blocks() const { return tree.arity() / mixture.arity(); }
};

inline RandomizedAlgorithm build_process_algorithm(const DecisionTree& a_prime,
                                   const PairMixture& q) {
  if (a_prime.arity() % q.arity() != 0)
    throw ArityError("tree arity not divisible by block size");
  std::optional<std::string> fallback;
  for (int leaf : a_prime.leaves()) {
    if (!a_prime.label(leaf))
      throw DefectError("composed-problem tree has an unlabeled leaf");
    if (!fallback || *a_prime.label(leaf) < *fallback) fallback = a_prime.label(leaf);
  }
  // Truncated runs default to the smallest output; harmless until a budget
  // is set, and overridable through truncate_runtime.
  return {a_prime, q, std::nullopt, *fallback};
}

inline std::string run_process_algorithm(const RandomizedAlgorithm& alg, const std::string& z,
                         Rng& rng) {
  if (static_cast<int>(z.size()) != alg.blocks())
    throw ArityError("input length != block count");
  RunResult r = run_process(alg.tree, alg.mixture, z, rng, alg.query_budget);
  if (r.stopped) return alg.fallback;
  return *alg.tree.label(r.leaf);
}

struct AlgorithmChart {
  std::map<std::string, Rat> output_dist;
  Rat expected_queries = 0;  // expected number of hidden-bit queries
  std::vector<Rat> query_probs;
  Rat stop_prob = 0;
};

inline AlgorithmChart exact_algorithm_chart(const RandomizedAlgorithm& alg,
                                            const std::string& z,
                                            size_t state_cap = 1'000'000) {
  ProcessChart pc = exact_process_chart(alg.tree, alg.mixture, z,
                                        alg.query_budget, state_cap);
  AlgorithmChart out;
  out.query_probs = pc.query_probs;
  out.stop_prob = pc.stop_prob;
  for (const Rat& f : pc.query_probs) out.expected_queries += f;
  for (const auto& [leaf, p] : pc.leaf_dist)
    out.output_dist[*alg.tree.label(leaf)] += p;
  if (pc.stop_prob > 0) out.output_dist[alg.fallback] += pc.stop_prob;
  return out;
}

inline RandomizedAlgorithm truncate_runtime(const RandomizedAlgorithm& alg,
                                            int64_t query_budget,
                                            const std::string& fallback) {
  if (query_budget < 0) throw DomainError("negative query budget");
  RandomizedAlgorithm out = alg;
  out.query_budget = query_budget;
  out.fallback = fallback;
  return out;
}

// ---------------------------------------------------------------------------
// Tree surgery

/// Appends per-block trees below leaves: after the top tree finishes at a
/// leaf, the attached trees run on their blocks in ascending block order.
/// Attachment keys are (leaf id in the top tree, block index).
inline DecisionTree append_subtrees(
    const DecisionTree& a_prime,
    const std::map<std::pair<int, int>, DecisionTree>& attachments, int t) {
  if (t <= 0 || a_prime.arity() % t != 0)
    throw ArityError("tree arity not divisible by block count");
  const int m = a_prime.arity() / t;
  for (const auto& [key, sub] : attachments) {
    if (sub.arity() != m) throw ArityError("attachment arity != block size");
    if (key.second < 1 || key.second > t)
      throw ArityError("attachment block out of range");
  }

  DecisionTree out(a_prime.arity());
  // Grafts `sub` (block-local indices) at global offsets; its leaves continue
  // into the rest of the attachment chain.
  auto graft_chain = [&](auto&& self, int leaf,
                         const std::vector<std::pair<int, const DecisionTree*>>& chain,
                         size_t pos, const DecisionTree* sub, int sv) -> int {
    if (sub == nullptr) {
      if (pos == chain.size()) return out.add_leaf(a_prime.label(leaf));
      return self(self, leaf, chain, pos + 1, chain[pos].second,
                  chain[pos].second->root());
    }
    const TreeNode& n = sub->node(sv);
    if (n.is_leaf()) {
      if (pos == chain.size()) return out.add_leaf(n.label);
      return self(self, leaf, chain, pos + 1, chain[pos].second,
                  chain[pos].second->root());
    }
    int block = chain[pos - 1].first;
    int global = (block - 1) * m + n.query;
    int c0 = self(self, leaf, chain, pos, sub, n.child0);
    int c1 = self(self, leaf, chain, pos, sub, n.child1);
    return out.add_internal(global, c0, c1);
  };

  auto rec = [&](auto&& self, int v) -> int {
    const TreeNode& n = a_prime.node(v);
    if (!n.is_leaf()) {
      int c0 = self(self, n.child0);
      int c1 = self(self, n.child1);
      return out.add_internal(n.query, c0, c1);
    }
    std::vector<std::pair<int, const DecisionTree*>> chain;
    for (int i = 1; i <= t; ++i) {
      auto it = attachments.find({v, i});
      if (it != attachments.end()) chain.emplace_back(i, &it->second);
    }
    return graft_chain(graft_chain, v, chain, 0, nullptr, -1);
  };
  // Structural validation in set_root rejects repeated queries inside a block.
  out.set_root(rec(rec, a_prime.root()));
  return out;
}

/// Cuts the tree once `budget` queries have been made; each cut point becomes
/// a leaf labeled with the majority value of g under mu within its subcube,
/// ties toward 0.  Cut subcubes carrying no mu-mass inherit the nearest
/// ancestor's majority label.
inline DecisionTree truncate(const DecisionTree& b, int budget, const Dist& mu,
                             const PartialFunction& g) {
  if (budget < 0) throw DomainError("negative budget");
  if (b.arity() != g.arity() || mu.arity() != g.arity())
    throw ArityError("truncate arity mismatch");
  for (const auto& [x, w] : mu.weights())
    if (g.evaluate(x) == GValue::invalid)
      throw DomainError("distribution touches invalid inputs");

  DecisionTree out(b.arity());
  auto majority = [&](const Subcube& c) -> std::optional<std::string> {
    Rat mass0 = 0, mass1 = 0;
    for (const auto& [x, w] : mu.weights()) {
      if (!c.contains(x)) continue;
      (g.evaluate(x) == GValue::zero ? mass0 : mass1) += w;
    }
    if (mass0 == 0 && mass1 == 0) return std::nullopt;
    return mass1 > mass0 ? std::string("1") : std::string("0");
  };

  auto rec = [&](auto&& self, int v, int made, const Subcube& c,
                 const std::string& inherited) -> int {
    std::string here = majority(c).value_or(inherited);
    const TreeNode& n = b.node(v);
    if (n.is_leaf()) return out.add_leaf(n.label);
    if (made == budget) return out.add_leaf(here);
    int c0 = self(self, n.child0, made + 1, c.fix(n.query, 0), here);
    int c1 = self(self, n.child1, made + 1, c.fix(n.query, 1), here);
    return out.add_internal(n.query, c0, c1);
  };
  Subcube full = Subcube::full(b.arity());
  std::string root_majority = majority(full).value_or("0");
  out.set_root(rec(rec, b.root(), 0, full, root_majority));
  return out;
}

}  // namespace qclab
