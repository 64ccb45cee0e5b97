#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qclab/bench.hpp"
#include "qclab/infoth.hpp"
#include "qclab/io.hpp"
#include "qclab/simproc.hpp"

namespace qclab {

struct SuiteResult {
  std::string name;
  size_t checked = 0;
  size_t failed = 0;
  std::vector<std::string> counterexamples;  // at most a handful, serialized
  std::string note;

  explicit SuiteResult(std::string suite) : name(std::move(suite)) {}

  bool pass() const { return failed == 0 && checked > 0; }

  void fail(const std::string& witness) {
    ++failed;
    if (counterexamples.size() < 5) counterexamples.push_back(witness);
  }
};

// ---------------------------------------------------------------------------
// Random instance generators.  Everything draws through Rng only, so suites
// are deterministic given their seed.

namespace gen {

inline std::vector<std::string> shuffled_strings(int m, Rng& rng) {
  auto v = all_strings(m);
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

inline PartialFunction random_partial_function(int m, Rng& rng) {
  for (;;) {
    std::set<std::string> zs, os;
    for (const auto& x : all_strings(m)) {
      switch (rng.below(4)) {
        case 0: zs.insert(x); break;
        case 1: os.insert(x); break;
        default: break;  // invalid
      }
    }
    if (!zs.empty() && !os.empty()) return PartialFunction(m, zs, os);
  }
}

/// Weights on a random nonempty subset, each a multiple of 1/units.
inline Dist random_grid_dist(const std::vector<std::string>& pts, Rng& rng,
                             unsigned units = 8) {
  std::map<std::string, Rat> w;
  for (unsigned u = 0; u < units; ++u)
    w[pts[rng.below(pts.size())]] += Rat(1, units);
  return Dist(static_cast<int>(pts.front().size()), std::move(w));
}

inline DistPair random_valid_pair(const PartialFunction& g, Rng& rng) {
  std::vector<std::string> zs(g.zeros().begin(), g.zeros().end());
  std::vector<std::string> os(g.ones().begin(), g.ones().end());
  return DistPair(random_grid_dist(zs, rng), random_grid_dist(os, rng));
}

/// A consistent mixture whose pair supports live on the two given sides.
inline PairMixture random_mixture(const std::vector<std::string>& zeros,
                                  const std::vector<std::string>& ones, Rng& rng,
                                  size_t max_pairs = 3) {
  size_t k = 1 + rng.below(max_pairs);
  std::vector<unsigned> units(k, 1);
  for (unsigned u = 0; u < 8 - k; ++u) ++units[rng.below(k)];
  std::vector<std::pair<Rat, DistPair>> entries;
  for (size_t i = 0; i < k; ++i)
    entries.emplace_back(Rat(units[i], 8),
                         DistPair(random_grid_dist(zeros, rng),
                                  random_grid_dist(ones, rng)));
  return PairMixture(std::move(entries));
}

inline PairMixture random_mixture(const PartialFunction& g, Rng& rng,
                                  size_t max_pairs = 3) {
  return random_mixture({g.zeros().begin(), g.zeros().end()},
                        {g.ones().begin(), g.ones().end()}, rng, max_pairs);
}

/// Unlabeled random tree; no query repeats on a path.
inline DecisionTree random_tree(int arity, int max_depth, Rng& rng) {
  DecisionTree t(arity);
  std::vector<int> avail(static_cast<size_t>(arity));
  for (int i = 0; i < arity; ++i) avail[static_cast<size_t>(i)] = i + 1;
  auto rec = [&](auto&& self, std::vector<int>& pool, int depth) -> int {
    if (depth >= max_depth || pool.empty() || rng.below(3) == 0)
      return t.add_leaf();
    size_t pick = rng.below(pool.size());
    int q = pool[pick];
    std::swap(pool[pick], pool.back());
    pool.pop_back();
    int c0 = self(self, pool, depth + 1);
    int c1 = self(self, pool, depth + 1);
    pool.push_back(q);
    return t.add_internal(q, c0, c1);
  };
  t.set_root(rec(rec, avail, 0));
  return t;
}

/// Random tree computing g: leaves appear only on value-forced subcubes.
inline DecisionTree random_computing_tree(const PartialFunction& g, Rng& rng) {
  DecisionTree t(g.arity());
  auto rec = [&](auto&& self, const Subcube& c) -> int {
    auto [closable, lbl] = pf_closing_label(g, c);
    auto free = c.free_indices();
    if (closable && (free.empty() || rng.below(4) < 3)) return t.add_leaf(lbl);
    if (free.empty()) throw DefectError("unclosable point subcube");
    int i = free[rng.below(free.size())];
    int c0 = self(self, c.fix(i, 0));
    int c1 = self(self, c.fix(i, 1));
    return t.add_internal(i, c0, c1);
  };
  t.set_root(rec(rec, Subcube::full(g.arity())));
  return t;
}

/// Disjoint nonempty (zeros, ones) ground sets for mixture generators.
inline std::pair<std::vector<std::string>, std::vector<std::string>>
random_disjoint_sides(int m, Rng& rng) {
  auto v = shuffled_strings(m, rng);
  size_t zmax = std::min<size_t>(4, v.size() - 1);
  size_t z = 1 + rng.below(zmax);
  size_t omax = std::min<size_t>(4, v.size() - z);
  size_t o = 1 + rng.below(omax);
  std::vector<std::string> zeros(v.begin(), v.begin() + static_cast<long>(z));
  std::vector<std::string> ones(v.begin() + static_cast<long>(z),
                                v.begin() + static_cast<long>(z + o));
  std::sort(zeros.begin(), zeros.end());
  std::sort(ones.begin(), ones.end());
  return {zeros, ones};
}

inline std::string random_bits(int t, Rng& rng) {
  std::string z(static_cast<size_t>(t), '0');
  for (auto& c : z) c = rng.below(2) ? '1' : '0';
  return z;
}

/// Block-local subcube a leaf induces on block i.
inline Subcube block_subcube(const DecisionTree& tree, int leaf, int block, int m) {
  Subcube global = tree.subcube_of(leaf);
  Subcube local = Subcube::full(m);
  for (int j = 1; j <= m; ++j) {
    int g = (block - 1) * m + j;
    if (global.fixes(g)) local = local.fix(j, global.fixed_bit(g));
  }
  return local;
}

/// A full instance for the process: a random top tree with per-block
/// completion trees appended at every leaf, so every block's walk dies on
/// every path.
inline DecisionTree random_full_tree(const PartialFunction& g, int t, Rng& rng,
                                     int top_depth) {
  const int m = g.arity();
  DecisionTree top = random_tree(t * m, top_depth, rng);
  std::map<std::pair<int, int>, DecisionTree> attach;
  for (int leaf : top.leaves())
    for (int i = 1; i <= t; ++i)
      attach.emplace(std::make_pair(leaf, i),
                     closure_tree(g, block_subcube(top, leaf, i, m)));
  return append_subtrees(top, attach, t);
}

}  // namespace gen

// ---------------------------------------------------------------------------
// Suite 1: the process reaches every node with exactly the probability the
// sampled-input distribution gives it.

inline SuiteResult verify_simulation(uint64_t seed = 1, size_t count = 200) {
  SuiteResult res{"simulation"};
  for (size_t k = 0; k < count; ++k) {
    Rng rng = Rng::substream(seed, k);
    int m = 1 + static_cast<int>(rng.below(3));
    int t = 1 + static_cast<int>(rng.below(3));
    auto [zeros, ones] = gen::random_disjoint_sides(m, rng);
    PairMixture q = gen::random_mixture(zeros, ones, rng);
    DecisionTree b = gen::random_tree(t * m, 6, rng);
    std::string z = gen::random_bits(t, rng);

    auto chart = exact_process_chart(b, q, z);
    auto push = gamma_pushforward(b, q, z);
    ++res.checked;
    bool ok = true;
    for (const auto& [v, p] : push) {
      auto it = chart.node_probs.find(v);
      Rat cp = it == chart.node_probs.end() ? Rat(0) : it->second;
      if (cp != p) ok = false;
    }
    for (const auto& [v, p] : chart.node_probs)
      if (!push.count(v) && p != 0) ok = false;
    Rat leaf_sum = 0;
    for (const auto& [l, p] : chart.leaf_dist) leaf_sum += p;
    if (leaf_sum != 1) ok = false;
    if (!ok)
      res.fail("tree=" + b.to_text() + " z=" + z +
               " mixture=" + mixture_to_json(q).dump());
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 2: the conflict walk of a computing tree halts with total mass
// exactly 1.

inline SuiteResult verify_walk_normalization(uint64_t seed = 2,
                                             size_t count = 500) {
  SuiteResult res{"walk-normalization"};
  for (size_t k = 0; k < count; ++k) {
    Rng rng = Rng::substream(seed, k);
    int m = 1 + static_cast<int>(rng.below(4));
    PartialFunction g = gen::random_partial_function(m, rng);
    DecisionTree t = gen::random_computing_tree(g, rng);
    DistPair pair = gen::random_valid_pair(g, rng);
    WalkChart chart = walk_chart(t, pair);
    ++res.checked;
    if (chart.mass != 1 || chart.total > t.max_depth())
      res.fail("tree=" + t.to_text() + " mass=" + rat_str(chart.mass));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 3: on point pairs the walk cost coincides with the separation depth,
// for every computing tree.

inline std::vector<std::pair<std::string, PartialFunction>> standard_catalog() {
  return {{"or2", make_or2()},
          {"and2", make_and2()},
          {"xor2", make_xor2()},
          {"maj3", make_maj3()},
          {"g0_4", make_g0(4)}};
}

inline SuiteResult verify_point_pairs(uint64_t seed = 3) {
  SuiteResult res{"point-pairs"};
  std::vector<PartialFunction> functions;
  for (auto& [name, g] : standard_catalog()) functions.push_back(g);
  Rng rng(seed);
  for (int extra = 0; extra < 6; ++extra)
    functions.push_back(gen::random_partial_function(2 + extra % 2, rng));

  for (const auto& g : functions) {
    if (g.arity() > 3) continue;
    auto structures = enumerate_trees(g.arity(), g.arity());
    for (const auto& structure : structures) {
      auto labeled = try_label_for(structure, g);
      if (!labeled) continue;
      for (const auto& x : g.zeros())
        for (const auto& y : g.ones()) {
          DistPair pair(Dist::point(x), Dist::point(y));
          WalkChart chart = walk_chart(*labeled, pair);
          ++res.checked;
          if (chart.mass != 1 || chart.total != Rat(sep(*labeled, x, y)))
            res.fail("tree=" + labeled->to_text() + " x=" + x + " y=" + y);
        }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 4: the restricted mixture game on singleton pairs has exactly the
// sabotage game's value; richer candidate sets never lose value.

inline std::vector<DistPair> singleton_candidates(const PartialFunction& g) {
  std::vector<DistPair> out;
  for (const auto& x : g.zeros())
    for (const auto& y : g.ones())
      out.emplace_back(Dist::point(x), Dist::point(y));
  return out;
}

inline SuiteResult verify_sabotage_game(uint64_t seed = 4) {
  SuiteResult res{"sabotage-game"};
  (void)seed;

  // Independent hand oracle for the or2 game restricted to its two
  // off-diagonal pairs: a 2x2 game without a saddle point has value
  // (ad - bc) / (a + d - b - c).
  {
    Rat a(2), bq(1), cq(1), d(2);
    Rat hand = (a * d - bq * cq) / (a + d - bq - cq);
    auto sab = sabotage(make_or2());
    ++res.checked;
    if (sab.value != hand || hand != Rat(3, 2)) res.fail("or2 sabotage value");
  }

  for (auto& [name, g] : standard_catalog()) {
    auto sab = sabotage(g);
    auto singles = chibar_lower_bound(g, singleton_candidates(g));
    ++res.checked;
    if (!sab.certified || !singles.certified || sab.value != singles.value)
      res.fail(name + ": sabotage=" + rat_str(sab.value) +
               " singleton-game=" + rat_str(singles.value));

    // Full-matrix route: all pairs against all computing trees.
    if (g.arity() <= 3) {
      auto pairs = cross_pairs(g, 4096);
      std::vector<DecisionTree> trees;
      for (const auto& s : enumerate_trees(g.arity(), g.arity()))
        if (auto labeled = try_label_for(s, g)) trees.push_back(*labeled);
      MatrixGame mg;
      for (const auto& [x, y] : pairs) {
        std::vector<Rat> row;
        for (const auto& t : trees) row.emplace_back(sep(t, x, y));
        mg.payoffs.push_back(std::move(row));
      }
      auto full = solve_matrix(mg);
      ++res.checked;
      if (full.value != sab.value)
        res.fail(name + ": full-matrix value " + rat_str(full.value));
    } else {
      // One valid pair only: any computing tree separates it at the root.
      ++res.checked;
      if (g.zeros().size() * g.ones().size() != 1 || sab.value != 1)
        res.fail(name + ": single-pair value " + rat_str(sab.value));
    }

    auto richer = chibar_lower_bound(g, default_chibar_candidates(g));
    ++res.checked;
    if (richer.value < singles.value)
      res.fail(name + ": candidate enlargement lowered the value");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 5: over full instances the per-block counts sum to at least the
// block count times the best single-block walk cost.

inline SuiteResult verify_direct_sum(uint64_t seed = 5, size_t count = 50) {
  SuiteResult res{"direct-sum"};
  for (size_t k = 0; k < count; ++k) {
    Rng rng = Rng::substream(seed, k);
    int m = 1 + static_cast<int>(rng.below(2));
    int t = 2;
    auto [zeros, ones] = gen::random_disjoint_sides(m, rng);
    PairMixture q = gen::random_mixture(zeros, ones, rng);
    PartialFunction g = q.implied_function();
    DecisionTree b = gen::random_full_tree(g, t, rng, 3);
    auto best = min_chi_mixture(g, q);
    if (!best.certified) {
      res.fail("minimization hit its budget");
      continue;
    }
    std::vector<std::string> all_z;
    for (const auto& z : all_strings(t)) all_z.push_back(z);
    for (const auto& z : all_z) {
      auto chart = exact_process_chart(b, q, z);
      ++res.checked;
      bool full = true;
      for (int i = 0; i < t; ++i)
        if (chart.query_probs[static_cast<size_t>(i)] != 1) full = false;
      Rat total = 0;
      for (const Rat& c : chart.expected_counts) total += c;
      if (!full || total < Rat(t) * best.value)
        res.fail("tree=" + b.to_text() + " z=" + z + (full ? "" : " (not full)") +
                 " total=" + rat_str(total) +
                 " bound=" + rat_str(Rat(t) * best.value));
    }
    // Hidden bits not yet queried cannot influence the state distribution.
    for (const auto& z : all_z)
      for (int i = 1; i <= t; ++i) {
        std::string z2 = z;
        z2[static_cast<size_t>(i - 1)] = z2[static_cast<size_t>(i - 1)] == '0' ? '1' : '0';
        auto c1 = exact_process_chart(b, q, z);
        auto c2 = exact_process_chart(b, q, z2);
        ++res.checked;
        bool ok = true;
        for (const auto& [key, p] : c1.state_probs) {
          if (key.second >> (i - 1) & 1) continue;  // block i already queried
          auto it = c2.state_probs.find(key);
          Rat p2 = it == c2.state_probs.end() ? Rat(0) : it->second;
          if (p2 != p) ok = false;
        }
        if (!ok) res.fail("state probabilities moved with an unqueried bit");
      }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 6: single-block instances tie the expected count to the walk cost,
// independently of the hidden bit.

inline SuiteResult verify_block_counts(uint64_t seed = 6, size_t count = 100) {
  SuiteResult res{"block-counts"};
  for (size_t k = 0; k < count; ++k) {
    Rng rng = Rng::substream(seed, k);
    int m = 1 + static_cast<int>(rng.below(3));
    auto [zeros, ones] = gen::random_disjoint_sides(m, rng);
    PairMixture q = gen::random_mixture(zeros, ones, rng);
    PartialFunction g = q.implied_function();
    DecisionTree b = gen::random_computing_tree(g, rng);
    auto c0 = exact_process_chart(b, q, "0");
    auto c1 = exact_process_chart(b, q, "1");
    Rat chi = chi_mixture(b, q);
    ++res.checked;
    if (c0.expected_counts[0] != chi || c1.expected_counts[0] != chi ||
        c0.query_probs[0] != 1 || c1.query_probs[0] != 1)
      res.fail("tree=" + b.to_text() + " chi=" + rat_str(chi) +
               " EN0=" + rat_str(c0.expected_counts[0]) +
               " EN1=" + rat_str(c1.expected_counts[0]));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 7: the composed algorithm on the parity-of-or2 instance is exactly
// correct and meets the query bound depth / (mixture game value).

inline SuiteResult verify_composition(uint64_t seed = 7) {
  SuiteResult res{"composition"};
  (void)seed;
  PartialFunction g = make_or2();
  Relation f = make_parity_relation(2);
  Relation composed_rel = compose(f, g, 2);
  auto opt = optimal_depth(composed_rel);
  ++res.checked;
  if (opt.depth != 4) res.fail("composed depth " + std::to_string(opt.depth));

  auto bound_game = chibar_lower_bound(g, default_chibar_candidates(g));
  std::vector<std::pair<Rat, DistPair>> entries = bound_game.witness;
  PairMixture q(std::move(entries));
  RandomizedAlgorithm alg = build_process_algorithm(opt.tree, q);

  Rat query_bound = Rat(opt.depth) / bound_game.value;
  for (const auto& z : all_strings(2)) {
    auto chart = exact_algorithm_chart(alg, z);
    std::string want = hamming_weight(z) % 2 ? "1" : "0";
    ++res.checked;
    auto it = chart.output_dist.find(want);
    if (it == chart.output_dist.end() || it->second != 1)
      res.fail("z=" + z + ": output distribution not concentrated on " + want);
    ++res.checked;
    if (chart.expected_queries > query_bound)
      res.fail("z=" + z + ": expected queries " + rat_str(chart.expected_queries) +
               " exceed " + rat_str(query_bound));
  }
  res.note = "expected queries bound " + rat_str(query_bound);
  return res;
}

// ---------------------------------------------------------------------------
// Suite 8: truncating the optimal-walk tree at ten times the squared walk
// cost leaves error below one half.

inline SuiteResult verify_truncation(uint64_t seed = 8, size_t count = 20) {
  SuiteResult res{"truncation"};
  std::vector<PartialFunction> gs = {make_or2(), make_maj3()};
  for (size_t k = 0; res.checked < count && k < 100 * count; ++k) {
    Rng rng = Rng::substream(seed, k);
    const PartialFunction& g = gs[k % gs.size()];
    std::vector<std::string> valid(g.zeros().begin(), g.zeros().end());
    valid.insert(valid.end(), g.ones().begin(), g.ones().end());
    Dist mu = gen::random_grid_dist(valid, rng, 16);
    Rat mass0 = 0;
    for (const auto& [x, w] : mu.weights())
      if (g.evaluate(x) == GValue::zero) mass0 += w;
    if (mass0 == 0 || mass0 == 1) continue;  // need both sides present

    Subcube full = Subcube::full(g.arity());
    std::map<std::string, Rat> w0, w1;
    for (const auto& [x, w] : mu.weights())
      (g.evaluate(x) == GValue::zero ? w0 : w1)[x] = w;
    for (auto& [x, w] : w0) w /= mass0;
    for (auto& [x, w] : w1) w /= 1 - mass0;
    DistPair pair(Dist(g.arity(), w0), Dist(g.arity(), w1));

    auto opt = min_chi_tree(pair, {}, &g);
    int d = static_cast<int>(rat_ceil(opt.value));
    DecisionTree cut = truncate(opt.tree, 10 * d * d, mu, g);
    Rat err = 0;
    for (const auto& [x, w] : mu.weights()) {
      auto r = cut.eval(x);
      std::string want = g.evaluate(x) == GValue::zero ? "0" : "1";
      if (!r.label || *r.label != want) err += w;
    }
    ++res.checked;
    if (err >= Rat(1, 2))
      res.fail("mu=" + dist_to_json(mu).dump() + " err=" + rat_str(err));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite 9: information-theoretic identities and inequalities.

inline SuiteResult verify_infoth(uint64_t seed = 9, size_t inequality_samples = 10'000,
                                 size_t identity_samples = 1'000) {
  SuiteResult res{"infoth"};
  auto rnd01 = [](Rng& rng) { return static_cast<double>(rng.below(1'000'000)) / 999'999.0; };

  // Pinsker sweep (strictly positive second argument keeps support valid).
  for (size_t k = 0; k < inequality_samples; ++k) {
    Rng rng = Rng::substream(seed, k);
    size_t n = 2 + rng.below(4);
    std::vector<double> p(n), q(n);
    double sp = 0, sq = 0;
    for (size_t i = 0; i < n; ++i) {
      p[i] = rng.below(4) == 0 ? 0.0 : rnd01(rng);
      q[i] = 0.01 + rnd01(rng);
      sp += p[i];
      sq += q[i];
    }
    if (sp == 0) p[0] = sp = 1;
    for (size_t i = 0; i < n; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    ++res.checked;
    if (!pinsker_check(p, q).holds) res.fail("pinsker sample " + std::to_string(k));
  }

  // Conditional-bias information bound sweep.
  for (size_t k = 0; k < inequality_samples; ++k) {
    Rng rng = Rng::substream(seed + 1, k);
    auto c = mutin_check(rnd01(rng), rnd01(rng), rnd01(rng));
    ++res.checked;
    if (!c.holds) res.fail("information bound sample " + std::to_string(k));
  }

  // Chain rule and the KL form of mutual information on random tables.
  for (size_t k = 0; k < identity_samples; ++k) {
    Rng rng = Rng::substream(seed + 2, k);
    std::vector<int> arities = {2, 2, 2, 2};
    std::map<std::vector<int>, double> probs;
    double total = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            double w = 0.001 + rnd01(rng);
            probs[{a, b, c, d}] = w;
            total += w;
          }
    for (auto& [key, w] : probs) w /= total;
    JointTable t(arities, probs);

    double joint = mutual_information(t, {0, 1}, {2}, {3});
    double chained = mutual_information(t, {0}, {2}, {3}) +
                     mutual_information(t, {1}, {2}, {3, 0});
    ++res.checked;
    if (std::abs(joint - chained) > kInfoTol)
      res.fail("chain rule sample " + std::to_string(k));

    // I(X;Y) equals the divergence of the joint from the product.
    auto mx = t.marginal({0});
    auto my = t.marginal({2});
    auto mxy = t.marginal({0, 2});
    std::vector<double> pj, pq;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        pj.push_back(mxy.count({a, b}) ? mxy[{a, b}] : 0.0);
        pq.push_back(mx[{a}] * my[{b}]);
      }
    double direct = mutual_information(t, {0}, {2});
    ++res.checked;
    if (std::abs(direct - kl(pj, pq)) > kInfoTol)
      res.fail("divergence form sample " + std::to_string(k));
  }
  return res;
}

inline SuiteResult verify_pinsker(uint64_t seed = 9, size_t samples = 10'000) {
  SuiteResult res = verify_infoth(seed, samples, 0);
  res.name = "pinsker";
  return res;
}

// ---------------------------------------------------------------------------
// Suite 10: the majority-probe protocol at the worst-case block weights.

inline SuiteResult verify_f0g0(uint64_t seed = 10, int n = 1600, int trials = 200,
                               int max_threads = 1) {
  SuiteResult res{"f0g0"};
  Rat eps(1, 3);
  int t = choose_t(eps, n);
  ++res.checked;
  if (n == 1600 && t != 21) res.fail("probe count " + std::to_string(t));

  // The binding-case advantage bound, checked with exact rationals.
  {
    const int64_t root = static_cast<int64_t>(std::llround(std::sqrt(double(n))));
    Rat low = majority_success_prob(n, static_cast<int>(n / 2 - root), t);
    Rat high = majority_success_prob(n, static_cast<int>(n / 2 + root), t);
    Rat bound = Rat(1, 2) + Rat(t) / Rat(8 * root);
    ++res.checked;
    if (low <= bound || high <= bound)
      res.fail("per-block success " + rat_str(low) + "/" + rat_str(high) +
               " not above " + rat_str(bound));
  }

  F0G0Report rep = run_f0g0(n, eps, trials, seed, max_threads);
  double gate = 1.0 / 3 + 3 * std::sqrt((1.0 / 3) * (2.0 / 3) / trials);
  ++res.checked;
  if (rep.failure_rate > gate)
    res.fail("failure rate " + mc_str(rep.failure_rate) + " above gate " + mc_str(gate));
  ++res.checked;
  if (rep.queries_per_trial != static_cast<int64_t>(t) * n)
    res.fail("query count per trial");
  res.note = "failures " + std::to_string(rep.failures) + "/" +
             std::to_string(rep.trials) + ", t=" + std::to_string(t);
  return res;
}

// ---------------------------------------------------------------------------
// Suite 11: the four optimizers agree with exhaustive enumeration.

inline SuiteResult verify_oracle_equivalence(uint64_t seed = 11,
                                             size_t instances = 100) {
  SuiteResult res{"oracle-equivalence"};
  for (size_t k = 0; k < instances; ++k) {
    Rng rng = Rng::substream(seed, k);
    int m = 1 + static_cast<int>(rng.below(3));
    PartialFunction g = gen::random_partial_function(m, rng);
    auto structures = enumerate_trees(m, m);
    std::vector<DecisionTree> computing;
    for (const auto& s : structures)
      if (auto labeled = try_label_for(s, g)) computing.push_back(*labeled);
    if (computing.empty()) throw DefectError("no computing tree enumerated");

    // optimal_depth
    {
      int best = m + 1;
      for (const auto& t : computing)
        best = std::min(best, t.max_depth() - 1);
      auto opt = optimal_depth(g);
      ++res.checked;
      if (opt.depth != best || !validate_computes(opt.tree, g).computes ||
          opt.tree.max_depth() - 1 != best)
        res.fail("depth mismatch at instance " + std::to_string(k));
    }

    // distributional_opt at a random depth budget
    {
      auto pts = all_strings(m);
      Dist mu = gen::random_grid_dist(pts, rng, 8);
      int l = static_cast<int>(rng.below(static_cast<uint64_t>(m) + 1));
      Problem h = Problem::of(g);
      Rat best = 2;
      for (const auto& s : enumerate_trees(m, l)) {
        Rat err = 0;
        for (int leaf : s.leaves()) {
          Subcube c = s.subcube_of(leaf);
          Rat cheapest = 2;
          for (const std::string& out : h.outputs) {
            Rat e = 0;
            for (const auto& [z, w] : mu.weights())
              if (c.contains(z) && !h.contains(z, out)) e += w;
            cheapest = rat_min(cheapest, e);
          }
          err += cheapest;
        }
        best = rat_min(best, err);
      }
      auto opt = distributional_opt(h, mu, l);
      ++res.checked;
      if (opt.error != best || opt.tree.max_depth() - 1 > l)
        res.fail("distributional mismatch at instance " + std::to_string(k));
    }

    // min_sep_tree on a random pair distribution
    {
      auto universe = cross_pairs(g, 4096);
      PairDist p;
      for (unsigned u = 0; u < 8; ++u)
        p[universe[rng.below(universe.size())]] += Rat(1, 8);
      Rat best;
      bool first = true;
      for (const auto& t : computing) {
        Rat v = 0;
        for (const auto& [pr, w] : p) v += w * Rat(sep(t, pr.first, pr.second));
        if (first || v < best) {
          best = v;
          first = false;
        }
      }
      auto opt = min_sep_tree(g, p);
      ++res.checked;
      Rat witness_value = 0;
      for (const auto& [pr, w] : p)
        witness_value += w * Rat(sep(opt.tree, pr.first, pr.second));
      if (opt.value != best || witness_value != best ||
          !validate_computes(opt.tree, g).computes)
        res.fail("separation mismatch at instance " + std::to_string(k));
    }

    // min_chi_tree on a random valid pair, with subtree optimality
    {
      DistPair pair = gen::random_valid_pair(g, rng);
      Rat best;
      bool first = true;
      for (const auto& t : computing) {
        WalkChart c = walk_chart(t, pair);
        if (c.mass != 1) {
          res.fail("computing tree not full at instance " + std::to_string(k));
          continue;
        }
        if (first || c.total < best) {
          best = c.total;
          first = false;
        }
      }
      auto opt = min_chi_tree(pair, {}, &g);
      WalkChart wit = walk_chart(opt.tree, pair);
      ++res.checked;
      if (opt.value != best || wit.total != best || opt.value < 1 ||
          opt.value > opt.tree.max_depth() ||
          !validate_computes(opt.tree, g).computes)
        res.fail("walk-cost mismatch at instance " + std::to_string(k));

      // Every live internal node's subtree is itself optimal for the
      // conditioned pair.
      bool sub_ok = true;
      for (const WalkNode& node : wit.nodes) {
        if (node.node == opt.tree.root()) continue;
        Subcube c = opt.tree.subcube_of(node.node);
        if (pair.mu0.mass_in(c) == 0 || pair.mu1.mass_in(c) == 0) continue;
        DistPair cond(pair.mu0.conditioned(c), pair.mu1.conditioned(c));
        DecisionTree sub(m);
        sub.set_root(graft(sub, opt.tree, node.node));
        Rat sub_chi = walk_chart(sub, cond).total;
        if (min_chi_tree(cond).value != sub_chi) sub_ok = false;
      }
      ++res.checked;
      if (!sub_ok) res.fail("subtree not optimal at instance " + std::to_string(k));
    }
  }
  return res;
}

}  // namespace qclab
