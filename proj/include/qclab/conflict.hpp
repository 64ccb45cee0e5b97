#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "qclab/games.hpp"
#include "qclab/rng.hpp"

namespace qclab {

// ---------------------------------------------------------------------------
// Walk quantities

struct WalkNode {
  int node = -1;
  int depth = 0;  // vertices on the root path, root = 1
  Rat p0, p1;     // Pr[x_q = 0 | at node] under mu0 / mu1
  Rat delta;      // |p0 - p1|
  Rat weight;     // survival probability R of the walk at this node
};

/// Per-node chart of the conflict walk of (tree, pair).  Only nodes the walk
/// reaches with positive probability appear.  `mass` is the total halting
/// probability; it equals 1 exactly when the walk almost surely halts.
struct WalkChart {
  std::vector<WalkNode> nodes;
  Rat total = 0;  // sum of depth * delta * weight: expected halting depth
  Rat mass = 0;   // sum of delta * weight
};

inline WalkChart walk_chart(const DecisionTree& t, const DistPair& pair) {
  if (t.arity() != pair.arity()) throw ArityError("tree/pair arity mismatch");
  WalkChart chart;
  Subcube full = Subcube::full(t.arity());
  auto rec = [&](auto&& self, int v, int depth, const Rat& weight,
                 const Subcube& here, const Dist& mu0, const Dist& mu1) -> void {
    if (t.is_leaf(v)) return;  // surviving mass leaks: the walk never halts here
    int q = t.query_at(v);
    Rat p0 = mu0.prob_bit0(q), p1 = mu1.prob_bit0(q);
    Rat delta = rat_abs(p0 - p1);
    chart.nodes.push_back({v, depth, p0, p1, delta, weight});
    chart.mass += delta * weight;
    chart.total += Rat(depth) * delta * weight;
    Rat left = rat_min(p0, p1);
    Rat right = 1 - rat_max(p0, p1);
    if (left > 0) {
      Subcube c = here.fix(q, 0);
      self(self, t.child(v, 0), depth + 1, weight * left, c, mu0.conditioned(c),
           mu1.conditioned(c));
    }
    if (right > 0) {
      Subcube c = here.fix(q, 1);
      self(self, t.child(v, 1), depth + 1, weight * right, c, mu0.conditioned(c),
           mu1.conditioned(c));
    }
  };
  rec(rec, t.root(), 1, Rat(1), full, pair.mu0, pair.mu1);
  if (chart.mass > 1) throw DefectError("walk mass exceeds 1");
  return chart;
}

inline bool is_full(const DecisionTree& t, const DistPair& pair) {
  return walk_chart(t, pair).mass == 1;
}

inline bool is_full(const DecisionTree& t, const PairMixture& q) {
  for (const auto& [w, pair] : q.entries())
    if (!is_full(t, pair)) return false;
  return true;
}

/// chi(T, Q): expectation over the mixture of per-pair walk costs.
inline Rat chi_mixture(const DecisionTree& t, const PairMixture& q) {
  Rat total = 0;
  for (const auto& [w, pair] : q.entries()) {
    WalkChart c = walk_chart(t, pair);
    if (c.mass != 1)
      throw FullnessError("walk mass " + rat_str(c.mass) + " < 1 for a pair");
    total += w * c.total;
  }
  return total;
}

// ---------------------------------------------------------------------------
// min over trees of chi(T, Q)

struct MinChiMixResult {
  Rat value;
  DecisionTree tree;
  bool certified = true;
};

namespace detail {

struct MixState {
  Rat weight;  // mixture weight times walk survival probability
  Dist mu0, mu1;
};

inline std::string mix_key(const Subcube& c, const std::vector<size_t>& idx,
                           const std::vector<Rat>& normalized) {
  std::string key = c.key();
  for (size_t k = 0; k < idx.size(); ++k)
    key += "|" + std::to_string(idx[k]) + ":" + rat_str(normalized[k]);
  return key;
}

}  // namespace detail

/// Exact min over trees (full for Q) of chi(T, Q).  States are memoized on
/// (subcube, normalized survival vector); the value is homogeneous of degree
/// one in the vector.  On budget overflow, returns the cost of the
/// smallest-index completion tree as a non-certified upper bound.
inline MinChiMixResult min_chi_mixture(const PartialFunction& g,
                                       const PairMixture& q,
                                       const TreeSearchBudget& budget = {}) {
  if (g.arity() != q.arity()) throw ArityError("function/mixture arity mismatch");
  if (!q.consistent_with(g))
    throw ConsistencyError("mixture not consistent with the function");
  budget.check();

  struct Memo {
    Rat value;
    int query;
  };
  std::unordered_map<std::string, Memo> memo;

  // Pair indices present in a state vector stay sorted, so the normalized
  // vector plus the subcube determine the subproblem.
  auto rec = [&](auto&& self, const Subcube& c,
                 const std::vector<size_t>& idx,
                 const std::vector<detail::MixState>& states) -> Rat {
    if (states.empty()) return Rat(0);
    Rat sum = 0;
    for (const auto& s : states) sum += s.weight;
    std::vector<Rat> normalized;
    normalized.reserve(states.size());
    for (const auto& s : states) normalized.push_back(s.weight / sum);
    std::string key = detail::mix_key(c, idx, normalized);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second.value * sum;
    if (memo.size() >= budget.memo_cap) throw BudgetError("memo cap exceeded");

    Rat best;
    int best_i = -1;
    for (int i : c.free_indices()) {
      Subcube c0 = c.fix(i, 0), c1 = c.fix(i, 1);
      std::vector<size_t> idx0, idx1;
      std::vector<detail::MixState> left, right;
      for (size_t k = 0; k < states.size(); ++k) {
        const auto& s = states[k];
        Rat p0 = s.mu0.prob_bit0(i), p1 = s.mu1.prob_bit0(i);
        Rat a = rat_min(p0, p1), b = 1 - rat_max(p0, p1);
        if (a > 0) {
          idx0.push_back(idx[k]);
          left.push_back({s.weight * a, s.mu0.conditioned(c0), s.mu1.conditioned(c0)});
        }
        if (b > 0) {
          idx1.push_back(idx[k]);
          right.push_back({s.weight * b, s.mu0.conditioned(c1), s.mu1.conditioned(c1)});
        }
      }
      Rat v = sum + self(self, c0, idx0, left) + self(self, c1, idx1, right);
      if (best_i < 0 || v < best) {
        best = v;
        best_i = i;
      }
    }
    if (best_i < 0) throw DefectError("live mixture on a point subcube");
    memo.emplace(std::move(key), Memo{best / sum, best_i});
    return best;
  };

  DecisionTree tree(g.arity());
  auto build = [&](auto&& self, const Subcube& c, const std::vector<size_t>& idx,
                   const std::vector<detail::MixState>& states) -> int {
    if (states.empty()) {
      DecisionTree done = closure_tree(g, c, budget);
      return graft(tree, done, done.root());
    }
    Rat sum = 0;
    for (const auto& s : states) sum += s.weight;
    std::vector<Rat> normalized;
    for (const auto& s : states) normalized.push_back(s.weight / sum);
    rec(rec, c, idx, states);
    int i = memo.at(detail::mix_key(c, idx, normalized)).query;

    Subcube c0 = c.fix(i, 0), c1 = c.fix(i, 1);
    std::vector<size_t> idx0, idx1;
    std::vector<detail::MixState> left, right;
    for (size_t k = 0; k < states.size(); ++k) {
      const auto& s = states[k];
      Rat p0 = s.mu0.prob_bit0(i), p1 = s.mu1.prob_bit0(i);
      Rat a = rat_min(p0, p1), b = 1 - rat_max(p0, p1);
      if (a > 0) {
        idx0.push_back(idx[k]);
        left.push_back({s.weight * a, s.mu0.conditioned(c0), s.mu1.conditioned(c0)});
      }
      if (b > 0) {
        idx1.push_back(idx[k]);
        right.push_back({s.weight * b, s.mu0.conditioned(c1), s.mu1.conditioned(c1)});
      }
    }
    int a = self(self, c0, idx0, left);
    int b = self(self, c1, idx1, right);
    return tree.add_internal(i, a, b);
  };

  std::vector<size_t> idx;
  std::vector<detail::MixState> states;
  for (size_t k = 0; k < q.entries().size(); ++k) {
    const auto& [w, pair] = q.entries()[k];
    idx.push_back(k);
    states.push_back({w, pair.mu0, pair.mu1});
  }
  Subcube full = Subcube::full(g.arity());
  try {
    Rat value = rec(rec, full, idx, states);
    tree.set_root(build(build, full, idx, states));
    return {value, std::move(tree), true};
  } catch (const BudgetError&) {
    DecisionTree fallback = closure_tree(g, full, budget);
    return {chi_mixture(fallback, q), std::move(fallback), false};
  }
}

// ---------------------------------------------------------------------------
// Sabotage complexity via the pair-vs-tree game

struct SabotageResult {
  Rat value;
  PairDist pair_dist;  // maximizer's optimal distribution over pairs
  std::vector<std::pair<Rat, DecisionTree>> tree_mix;  // minimizer's support
  bool certified = true;
};

inline std::vector<std::pair<std::string, std::string>> cross_pairs(
    const PartialFunction& g, size_t cap) {
  if (g.zeros().empty() || g.ones().empty())
    throw PairError("function needs valid inputs on both sides");
  if (g.zeros().size() * g.ones().size() > cap)
    throw BudgetError("pair universe exceeds cap");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& x : g.zeros())
    for (const auto& y : g.ones()) out.emplace_back(x, y);
  return out;
}

/// Exact game value of max over pair distributions, min over computing trees,
/// of the expected separation depth.
inline SabotageResult sabotage(const PartialFunction& g,
                               const TreeSearchBudget& budget = {},
                               size_t pair_cap = 4096,
                               size_t max_rounds = kDefaultOracleRounds) {
  auto universe = cross_pairs(g, pair_cap);
  using RowS = std::pair<std::string, std::string>;
  OracleGame<RowS, DecisionTree> game;
  game.payoff = [](const RowS& p, const DecisionTree& t) {
    return Rat(sep(t, p.first, p.second));
  };
  game.row_key = [](const RowS& p) { return p.first + "," + p.second; };
  game.col_key = [](const DecisionTree& t) { return t.to_text(); };
  game.row_oracle = [&](const std::vector<std::pair<size_t, Rat>>& cmix) {
    BestResponse<RowS> best;
    bool first = true;
    for (const auto& p : universe) {
      Rat v = 0;
      for (const auto& [j, w] : cmix) v += w * game.payoff(p, game.cols[j]);
      if (first || v > best.value) {
        best = {p, v};
        first = false;
      }
    }
    return best;
  };
  game.col_oracle = [&](const std::vector<std::pair<size_t, Rat>>& rmix) {
    PairDist p;
    for (const auto& [i, w] : rmix) p[game.rows[i]] += w;
    auto opt = min_sep_tree(g, p, budget);
    return BestResponse<DecisionTree>{std::move(opt.tree), opt.value};
  };
  game.rows.push_back(universe.front());
  game.cols.push_back(closure_tree(g, Subcube::full(g.arity()), budget));

  auto res = double_oracle(game, Rat(0), max_rounds);
  SabotageResult out;
  out.certified = res.certified;
  out.value = res.certified ? res.lo : res.hi;
  for (const auto& [i, w] : res.row_mix) out.pair_dist[game.rows[i]] += w;
  for (const auto& [j, w] : res.col_mix) out.tree_mix.emplace_back(w, game.cols[j]);
  return out;
}

// ---------------------------------------------------------------------------
// Certified lower bounds on the max conflict complexity

struct ChibarResult {
  Rat value;
  std::vector<std::pair<Rat, DistPair>> witness;  // optimal mixture entries
  bool certified = true;
};

/// Exact value of the restricted game: mixtures over the given candidate
/// pairs against trees computing g.  Always a lower bound on the unrestricted
/// maximum, and monotone in the candidate set.
inline ChibarResult chibar_lower_bound(const PartialFunction& g,
                                       const std::vector<DistPair>& candidates,
                                       const TreeSearchBudget& budget = {},
                                       size_t max_rounds = kDefaultOracleRounds) {
  if (candidates.empty()) throw DomainError("no candidate pairs");
  std::set<std::string> s0, s1;
  for (const auto& c : candidates) {
    if (c.arity() != g.arity()) throw ArityError("candidate arity mismatch");
    if (!c.consistent_with(g))
      throw ConsistencyError("candidate pair not consistent with the function");
    for (const auto& [x, w] : c.mu0.weights()) s0.insert(x);
    for (const auto& [x, w] : c.mu1.weights()) s1.insert(x);
  }
  for (const auto& x : s0)
    if (s1.count(x))
      throw ConsistencyError("candidate set inconsistent at " + x);

  OracleGame<size_t, DecisionTree> game;
  game.payoff = [&](size_t k, const DecisionTree& t) {
    WalkChart c = walk_chart(t, candidates[k]);
    if (c.mass != 1) throw FullnessError("tree not full for a candidate pair");
    return c.total;
  };
  game.row_key = [](size_t k) { return std::to_string(k); };
  game.col_key = [](const DecisionTree& t) { return t.to_text(); };
  game.row_oracle = [&](const std::vector<std::pair<size_t, Rat>>& cmix) {
    BestResponse<size_t> best;
    bool first = true;
    for (size_t k = 0; k < candidates.size(); ++k) {
      Rat v = 0;
      for (const auto& [j, w] : cmix) v += w * game.payoff(k, game.cols[j]);
      if (first || v > best.value) {
        best = {k, v};
        first = false;
      }
    }
    return best;
  };
  game.col_oracle = [&](const std::vector<std::pair<size_t, Rat>>& rmix) {
    std::vector<std::pair<Rat, DistPair>> entries;
    for (const auto& [i, w] : rmix) entries.emplace_back(w, candidates[game.rows[i]]);
    PairMixture q(std::move(entries));
    auto opt = min_chi_mixture(g, q, budget);
    if (!opt.certified) throw BudgetError("mixture minimization hit its budget");
    return BestResponse<DecisionTree>{std::move(opt.tree), opt.value};
  };
  game.rows.push_back(0);
  game.cols.push_back(closure_tree(g, Subcube::full(g.arity()), budget));

  auto res = double_oracle(game, Rat(0), max_rounds);
  ChibarResult out;
  out.certified = res.certified;
  out.value = res.certified ? res.lo : res.hi;
  for (const auto& [i, w] : res.row_mix)
    out.witness.emplace_back(w, candidates[game.rows[i]]);
  return out;
}

/// Default candidate pairs: all singleton pairs plus uniform distributions
/// over two-element subsets of each preimage, crossed.
inline std::vector<DistPair> default_chibar_candidates(const PartialFunction& g,
                                                       size_t cap = 4096) {
  auto side = [](const std::set<std::string>& pts) {
    std::vector<Dist> out;
    std::vector<std::string> v(pts.begin(), pts.end());
    for (const auto& x : v) out.push_back(Dist::point(x));
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j)
        out.push_back(Dist::uniform(std::vector<std::string>{v[i], v[j]}));
    return out;
  };
  auto d0 = side(g.zeros()), d1 = side(g.ones());
  if (d0.empty() || d1.empty())
    throw PairError("function needs valid inputs on both sides");
  if (d0.size() * d1.size() > cap)
    throw BudgetError("candidate universe exceeds cap");
  std::vector<DistPair> out;
  for (const auto& a : d0)
    for (const auto& b : d1) out.emplace_back(a, b);
  return out;
}

// ---------------------------------------------------------------------------
// Grid search for conflict complexity lower bounds

struct ChiSearchResult {
  Rat value = 0;
  std::vector<std::pair<std::string, Rat>> mu0, mu1;  // best pair found
};

namespace detail {

inline Dist grid_dist(const std::vector<std::string>& pts,
                      const std::vector<unsigned>& counts, unsigned denom) {
  std::map<std::string, Rat> w;
  for (size_t i = 0; i < pts.size(); ++i)
    if (counts[i] > 0) w[pts[i]] = Rat(counts[i], denom);
  return Dist(static_cast<int>(pts.front().size()), std::move(w));
}

}  // namespace detail

/// Coordinate ascent over rational-grid pair weights, maximizing the minimum
/// walk cost.  The result is a certified lower bound on the conflict
/// complexity; it is never claimed optimal.  Deterministic given the seed.
inline ChiSearchResult chi_search(const PartialFunction& g, unsigned restarts = 32,
                                  unsigned grid_denominator = 16,
                                  uint64_t seed = 0,
                                  const TreeSearchBudget& budget = {}) {
  if (grid_denominator == 0) throw DomainError("grid denominator must be positive");
  std::vector<std::string> zs(g.zeros().begin(), g.zeros().end());
  std::vector<std::string> os(g.ones().begin(), g.ones().end());
  if (zs.empty() || os.empty())
    throw PairError("function needs valid inputs on both sides");

  const unsigned denom = grid_denominator;
  auto value_of = [&](const std::vector<unsigned>& c0,
                      const std::vector<unsigned>& c1) {
    DistPair pair(detail::grid_dist(zs, c0, denom), detail::grid_dist(os, c1, denom));
    return min_chi_tree(pair, budget, &g).value;
  };

  auto uniform_counts = [&](size_t n) {
    std::vector<unsigned> c(n, denom / static_cast<unsigned>(n));
    unsigned rem = denom % static_cast<unsigned>(n);
    for (size_t i = 0; i < rem; ++i) ++c[i];
    return c;
  };
  auto random_counts = [&](size_t n, Rng& rng) {
    std::vector<unsigned> c(n, 0);
    for (unsigned u = 0; u < denom; ++u) ++c[rng.below(n)];
    return c;
  };

  ChiSearchResult best;
  bool have = false;
  for (unsigned r = 0; r < std::max(restarts, 1u); ++r) {
    Rng rng = Rng::substream(seed, r);
    std::vector<unsigned> c0 =
        r == 0 ? uniform_counts(zs.size()) : random_counts(zs.size(), rng);
    std::vector<unsigned> c1 =
        r == 0 ? uniform_counts(os.size()) : random_counts(os.size(), rng);
    Rat cur = value_of(c0, c1);
    // Moves: shift one unit i -> j, or spread two units i -> {j, k}.  The
    // spread escapes plateaus where the objective is a min over coordinates
    // that must rise together.
    for (bool improved = true; improved;) {
      improved = false;
      for (auto* side : {&c0, &c1}) {
        auto& c = *side;
        auto try_move = [&](std::vector<std::pair<size_t, int>> deltas) {
          for (auto [i, d] : deltas)
            if (d < 0 && c[i] < static_cast<unsigned>(-d)) return false;
          for (auto [i, d] : deltas) c[i] = static_cast<unsigned>(static_cast<int>(c[i]) + d);
          Rat v = value_of(c0, c1);
          if (v > cur) {
            cur = v;
            return true;
          }
          for (auto [i, d] : deltas) c[i] = static_cast<unsigned>(static_cast<int>(c[i]) - d);
          return false;
        };
        for (size_t i = 0; i < c.size() && !improved; ++i)
          for (size_t j = 0; j < c.size() && !improved; ++j) {
            if (i == j) continue;
            improved = try_move({{i, -1}, {j, 1}});
            for (size_t k = j + 1; k < c.size() && !improved; ++k) {
              if (k == i) continue;
              improved = try_move({{i, -2}, {j, 1}, {k, 1}});
            }
          }
        if (improved) break;
      }
    }
    if (!have || cur > best.value) {
      have = true;
      best.value = cur;
      best.mu0.clear();
      best.mu1.clear();
      for (size_t i = 0; i < zs.size(); ++i)
        if (c0[i] > 0) best.mu0.emplace_back(zs[i], Rat(c0[i], denom));
      for (size_t i = 0; i < os.size(); ++i)
        if (c1[i] > 0) best.mu1.emplace_back(os[i], Rat(c1[i], denom));
    }
  }
  return best;
}

}  // namespace qclab
