#pragma once

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qclab/core.hpp"

namespace qclab {

struct TreeSearchBudget {
  int max_depth = 64;
  size_t max_nodes = size_t{1} << 20;
  size_t memo_cap = size_t{1} << 20;

  void check() const {
    if (max_depth <= 0 || max_nodes == 0 || memo_cap == 0)
      throw DomainError("search budget fields must be positive");
  }
};

// ---------------------------------------------------------------------------
// DecisionTree

struct TreeNode {
  int query = 0;  // 1-based query index; 0 marks a leaf
  int child0 = -1;
  int child1 = -1;
  std::optional<std::string> label;

  bool is_leaf() const { return query == 0; }
};

/// Binary query tree over m-bit inputs.  Nodes live in an arena; the root is
/// explicit.  Depth is counted in vertices: the root has depth 1.
class DecisionTree {
 public:
  explicit DecisionTree(int m) : m_(m) {
    if (m < 0) throw ArityError("negative arity");
  }

  static DecisionTree single_leaf(int m, std::optional<std::string> label = {}) {
    DecisionTree t(m);
    t.set_root(t.add_leaf(std::move(label)));
    return t;
  }

  int add_leaf(std::optional<std::string> label = {}) {
    nodes_.push_back(TreeNode{0, -1, -1, std::move(label)});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_internal(int query, int child0, int child1) {
    if (query < 1 || query > m_) throw ArityError("query index out of range");
    if (child0 < 0 || child0 >= static_cast<int>(nodes_.size()) || child1 < 0 ||
        child1 >= static_cast<int>(nodes_.size()))
      throw StructureError("child index out of range");
    nodes_.push_back(TreeNode{query, child0, child1, std::nullopt});
    return static_cast<int>(nodes_.size()) - 1;
  }

  void set_root(int r) {
    if (r < 0 || r >= static_cast<int>(nodes_.size()))
      throw StructureError("root index out of range");
    root_ = r;
    validate();
  }

  int arity() const { return m_; }
  int root() const {
    if (root_ < 0) throw StructureError("tree has no root");
    return root_;
  }
  size_t size() const { return nodes_.size(); }
  const TreeNode& node(int v) const { return nodes_.at(static_cast<size_t>(v)); }
  bool is_leaf(int v) const { return node(v).is_leaf(); }
  int query_at(int v) const { return node(v).query; }
  int child(int v, int b) const { return b ? node(v).child1 : node(v).child0; }
  const std::optional<std::string>& label(int v) const { return node(v).label; }

  void set_label(int v, std::optional<std::string> label) {
    if (!is_leaf(v)) throw StructureError("labels live on leaves");
    nodes_[static_cast<size_t>(v)].label = std::move(label);
  }

  /// Max over nodes of the vertex count on the root path (root alone = 1).
  int max_depth() const {
    int best = 0;
    walk(root(), 1, [&](int, int d) { best = std::max(best, d); });
    return best;
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    walk(root(), 1, [&](int v, int) {
      if (is_leaf(v)) out.push_back(v);
    });
    return out;
  }

  struct EvalResult {
    int leaf;
    std::optional<std::string> label;
  };

  EvalResult eval(std::string_view x) const {
    if (x.size() != static_cast<size_t>(m_))
      throw ArityError("eval: string length != arity");
    int v = root();
    while (!is_leaf(v)) v = child(v, bit_at(x, query_at(v)));
    return {v, label(v)};
  }

  /// Subcube of inputs reaching v.
  Subcube subcube_of(int v) const {
    Subcube c = Subcube::full(m_);
    std::vector<int> path;
    if (!find_path(root(), v, path))
      throw StructureError("node not reachable from root");
    for (size_t k = 0; k + 1 < path.size(); ++k) {
      int u = path[k];
      int b = child(u, 1) == path[k + 1] ? 1 : 0;
      c = c.fix(query_at(u), b);
    }
    return c;
  }

  std::string to_text() const { return text_rec(root()); }

  static DecisionTree parse_text(const std::string& text, int m) {
    DecisionTree t(m);
    size_t pos = 0;
    int root = parse_rec(text, pos, t);
    skip_ws(text, pos);
    if (pos != text.size()) throw ParseError("trailing characters after tree");
    t.set_root(root);
    return t;
  }

  template <typename Fn>
  void walk(int v, int depth, Fn&& fn) const {
    fn(v, depth);
    if (!is_leaf(v)) {
      walk(child(v, 0), depth + 1, fn);
      walk(child(v, 1), depth + 1, fn);
    }
  }

 private:
  void validate() const {
    std::vector<bool> on_path(static_cast<size_t>(m_) + 1, false);
    validate_rec(root_, on_path, 0);
  }

  void validate_rec(int v, std::vector<bool>& on_path, int depth) const {
    if (depth > static_cast<int>(nodes_.size()))
      throw StructureError("cycle in tree arena");
    const TreeNode& n = node(v);
    if (n.is_leaf()) return;
    if (n.child0 < 0 || n.child1 < 0)
      throw StructureError("internal node missing a child");
    if (on_path[static_cast<size_t>(n.query)])
      throw StructureError("query " + std::to_string(n.query) +
                           " repeats on a root-to-node path");
    on_path[static_cast<size_t>(n.query)] = true;
    validate_rec(n.child0, on_path, depth + 1);
    validate_rec(n.child1, on_path, depth + 1);
    on_path[static_cast<size_t>(n.query)] = false;
  }

  bool find_path(int u, int target, std::vector<int>& path) const {
    path.push_back(u);
    if (u == target) return true;
    if (!is_leaf(u)) {
      if (find_path(child(u, 0), target, path)) return true;
      if (find_path(child(u, 1), target, path)) return true;
    }
    path.pop_back();
    return false;
  }

  std::string text_rec(int v) const {
    const TreeNode& n = node(v);
    if (n.is_leaf()) {
      if (!n.label) return "(leaf)";
      for (char c : *n.label)
        if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n')
          throw ParseError("leaf label not serializable: " + *n.label);
      return "(leaf " + *n.label + ")";
    }
    return "(q " + std::to_string(n.query) + " " + text_rec(n.child0) + " " +
           text_rec(n.child1) + ")";
  }

  static void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n' ||
                              s[pos] == '\r'))
      ++pos;
  }

  static std::string next_token(const std::string& s, size_t& pos) {
    skip_ws(s, pos);
    size_t start = pos;
    while (pos < s.size() && s[pos] != '(' && s[pos] != ')' && s[pos] != ' ' &&
           s[pos] != '\t' && s[pos] != '\n' && s[pos] != '\r')
      ++pos;
    if (start == pos) throw ParseError("expected token in tree text");
    return s.substr(start, pos - start);
  }

  static int parse_rec(const std::string& s, size_t& pos, DecisionTree& t) {
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != '(') throw ParseError("expected '('");
    ++pos;
    std::string head = next_token(s, pos);
    if (head == "leaf") {
      skip_ws(s, pos);
      std::optional<std::string> label;
      if (pos < s.size() && s[pos] != ')') label = next_token(s, pos);
      skip_ws(s, pos);
      if (pos >= s.size() || s[pos] != ')') throw ParseError("expected ')'");
      ++pos;
      return t.add_leaf(std::move(label));
    }
    if (head != "q") throw ParseError("expected 'q' or 'leaf', got " + head);
    int query = 0;
    try {
      query = std::stoi(next_token(s, pos));
    } catch (const std::exception&) {
      throw ParseError("bad query index");
    }
    int c0 = parse_rec(s, pos, t);
    int c1 = parse_rec(s, pos, t);
    skip_ws(s, pos);
    if (pos >= s.size() || s[pos] != ')') throw ParseError("expected ')'");
    ++pos;
    return t.add_internal(query, c0, c1);
  }

  int m_ = 0;
  std::vector<TreeNode> nodes_;
  int root_ = -1;
};

inline DecisionTree::EvalResult eval_tree(const DecisionTree& t,
                                          std::string_view x) {
  return t.eval(x);
}

// ---------------------------------------------------------------------------
// Computing a function; separation depth

struct ValidationResult {
  bool computes = false;
  std::string witness;  // a valid input handled incorrectly, when !computes
};

inline ValidationResult validate_computes(const DecisionTree& t,
                                          const PartialFunction& g) {
  if (t.arity() != g.arity()) throw ArityError("tree/function arity mismatch");
  for (const auto& [pts, want] :
       {std::pair{&g.zeros(), std::string("0")}, {&g.ones(), std::string("1")}}) {
    for (const auto& x : *pts) {
      auto r = t.eval(x);
      if (!r.label || *r.label != want) return {false, x};
    }
  }
  return {true, {}};
}

/// Depth (1-based) of the first node on the common path of x and y whose
/// query separates them.
inline int sep(const DecisionTree& t, std::string_view x, std::string_view y) {
  if (x.size() != static_cast<size_t>(t.arity()) || y.size() != x.size())
    throw ArityError("sep: arity mismatch");
  if (x == y) throw PairError("sep: identical strings");
  int v = t.root();
  int depth = 1;
  while (!t.is_leaf(v)) {
    int q = t.query_at(v);
    if (bit_at(x, q) != bit_at(y, q)) return depth;
    v = t.child(v, bit_at(x, q));
    ++depth;
  }
  throw SeparationError("common path reaches a leaf without separation");
}

// ---------------------------------------------------------------------------
// Problem adaptor: uniform view of relations and partial functions for the
// subcube dynamic programs.

struct Problem {
  int arity = 0;
  std::vector<std::string> outputs;
  std::function<bool(std::string_view, const std::string&)> contains;

  static Problem of(const Relation& r, size_t cap = kDefaultEnumerationCap) {
    Problem p;
    p.arity = r.arity();
    p.outputs = r.outputs(cap);
    p.contains = [r](std::string_view z, const std::string& s) {
      return r.contains(z, s);
    };
    return p;
  }

  static Problem of(const PartialFunction& g) {
    Problem p;
    p.arity = g.arity();
    p.outputs = {"0", "1"};
    p.contains = [g](std::string_view z, const std::string& s) {
      return pf_accepts(g, z, s);
    };
    return p;
  }
};

/// Smallest output valid for every point of C, if one exists.
inline std::optional<std::string> closing_output(const Problem& h,
                                                 const Subcube& c) {
  for (const auto& s : h.outputs) {
    bool ok = true;
    for (const auto& z : c.members())
      if (!h.contains(z, s)) {
        ok = false;
        break;
      }
    if (ok) return s;
  }
  return std::nullopt;
}

namespace detail {

inline void check_dp_instance(int arity, const TreeSearchBudget& budget) {
  budget.check();
  double states = 1;
  for (int i = 0; i < arity; ++i) states *= 3;
  if (states > static_cast<double>(budget.memo_cap))
    throw BudgetError("subcube state space 3^" + std::to_string(arity) +
                      " exceeds memo cap");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// optimal_depth

struct DepthResult {
  int depth = 0;
  DecisionTree tree;
};

/// Exact deterministic query complexity with a witness tree.  Ties between
/// query indices break toward the smallest index; closing labels are the
/// lexicographically smallest valid output.
inline DepthResult optimal_depth(const Problem& h,
                                 const TreeSearchBudget& budget = {}) {
  detail::check_dp_instance(h.arity, budget);
  std::unordered_map<std::string, int> memo;
  auto rec = [&](auto&& self, const Subcube& c) -> int {
    auto it = memo.find(c.key());
    if (it != memo.end()) return it->second;
    if (memo.size() >= budget.memo_cap) throw BudgetError("memo cap exceeded");
    int value;
    if (closing_output(h, c)) {
      value = 0;
    } else {
      value = h.arity + 1;
      for (int i : c.free_indices()) {
        int d = 1 + std::max(self(self, c.fix(i, 0)), self(self, c.fix(i, 1)));
        value = std::min(value, d);
      }
      if (value > h.arity)
        throw DefectError("no closing output on a full-codim subcube");
    }
    memo.emplace(c.key(), value);
    return value;
  };

  DecisionTree tree(h.arity);
  auto build = [&](auto&& self, const Subcube& c) -> int {
    if (auto s = closing_output(h, c)) return tree.add_leaf(*s);
    int want = rec(rec, c);
    for (int i : c.free_indices()) {
      Subcube c0 = c.fix(i, 0), c1 = c.fix(i, 1);
      if (1 + std::max(rec(rec, c0), rec(rec, c1)) == want) {
        int a = self(self, c0);
        int b = self(self, c1);
        return tree.add_internal(i, a, b);
      }
    }
    throw DefectError("optimal_depth witness reconstruction failed");
  };

  Subcube full = Subcube::full(h.arity);
  int d = rec(rec, full);
  tree.set_root(build(build, full));
  return {d, std::move(tree)};
}

inline DepthResult optimal_depth(const PartialFunction& g,
                                 const TreeSearchBudget& budget = {}) {
  return optimal_depth(Problem::of(g), budget);
}
inline DepthResult optimal_depth(const Relation& r,
                                 const TreeSearchBudget& budget = {}) {
  return optimal_depth(Problem::of(r), budget);
}

// ---------------------------------------------------------------------------
// distributional_opt

struct DistOptResult {
  Rat error;  // exact minimum distributional error at the depth budget
  DecisionTree tree;
};

/// Minimum of Pr_{z ~ mu}[(z, T(z)) not in h] over trees of depth <= budget
/// (depth counted in queries here: a depth budget of L allows L queries on
/// every path).
inline DistOptResult distributional_opt(const Problem& h, const Dist& mu,
                                        int depth_budget,
                                        const TreeSearchBudget& budget = {}) {
  if (mu.arity() != h.arity) throw ArityError("distribution arity mismatch");
  if (depth_budget < 0) throw DomainError("negative depth budget");
  detail::check_dp_instance(h.arity, budget);

  // Unnormalized error mass of closing c with its best label.
  auto leaf_best = [&](const Subcube& c) -> std::pair<Rat, std::string> {
    Rat total = mu.mass_in(c);
    Rat best_correct = -1;
    std::string best_s;
    for (const auto& s : h.outputs) {
      Rat correct = 0;
      for (const auto& [z, w] : mu.weights())
        if (c.contains(z) && h.contains(z, s)) correct += w;
      if (correct > best_correct) {
        best_correct = correct;
        best_s = s;
      }
    }
    return {total - best_correct, best_s};
  };

  std::unordered_map<std::string, Rat> memo;
  auto rec = [&](auto&& self, const Subcube& c, int l) -> Rat {
    std::string key = c.key() + ":" + std::to_string(l);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (memo.size() >= budget.memo_cap) throw BudgetError("memo cap exceeded");
    Rat value = leaf_best(c).first;
    if (l > 0 && value > 0 && mu.mass_in(c) > 0) {
      for (int i : c.free_indices()) {
        Rat split = self(self, c.fix(i, 0), l - 1) + self(self, c.fix(i, 1), l - 1);
        value = rat_min(value, split);
      }
    }
    memo.emplace(std::move(key), value);
    return value;
  };

  DecisionTree tree(h.arity);
  auto build = [&](auto&& self, const Subcube& c, int l) -> int {
    Rat want = rec(rec, c, l);
    auto [leaf_err, leaf_label] = leaf_best(c);
    if (leaf_err == want) return tree.add_leaf(leaf_label);
    for (int i : c.free_indices()) {
      Subcube c0 = c.fix(i, 0), c1 = c.fix(i, 1);
      if (rec(rec, c0, l - 1) + rec(rec, c1, l - 1) == want)
        return tree.add_internal(i, self(self, c0, l - 1), self(self, c1, l - 1));
    }
    throw DefectError("distributional_opt witness reconstruction failed");
  };

  Subcube full = Subcube::full(h.arity);
  Rat err = rec(rec, full, depth_budget);
  tree.set_root(build(build, full, depth_budget));
  return {err, std::move(tree)};
}

/// Least depth budget whose optimal distributional error is <= eps.
inline int distributional_complexity(const Problem& h, const Dist& mu,
                                     const Rat& eps,
                                     const TreeSearchBudget& budget = {}) {
  for (int l = 0; l <= h.arity; ++l)
    if (distributional_opt(h, mu, l, budget).error <= eps) return l;
  throw DefectError("full-depth tree still errs");
}

// ---------------------------------------------------------------------------
// Completion trees

/// True when some single output bit is correct for every valid input of g in
/// c; the chosen bit, with ties toward 0.
inline std::pair<bool, std::string> pf_closing_label(const PartialFunction& g,
                                                     const Subcube& c) {
  bool has0 = false, has1 = false;
  for (const auto& x : g.zeros())
    if (c.contains(x)) {
      has0 = true;
      break;
    }
  for (const auto& x : g.ones())
    if (c.contains(x)) {
      has1 = true;
      break;
    }
  if (has0 && has1) return {false, {}};
  if (has1) return {true, "1"};
  return {true, "0"};
}

namespace detail {

inline int closure_rec(const PartialFunction& g, const Subcube& c,
                       DecisionTree& t, const TreeSearchBudget& budget) {
  if (t.size() >= budget.max_nodes) throw BudgetError("closure tree too large");
  auto [closable, lbl] = pf_closing_label(g, c);
  if (closable) return t.add_leaf(lbl);
  auto free = c.free_indices();
  if (free.empty()) throw DefectError("point subcube with both labels");
  int i = free.front();
  int a = closure_rec(g, c.fix(i, 0), t, budget);
  int b = closure_rec(g, c.fix(i, 1), t, budget);
  return t.add_internal(i, a, b);
}

}  // namespace detail

/// Smallest-index query tree that computes g on the subcube c (queries free
/// coordinates until the value is forced, then labels).
inline DecisionTree closure_tree(const PartialFunction& g, const Subcube& c,
                                 const TreeSearchBudget& budget = {}) {
  DecisionTree t(g.arity());
  t.set_root(detail::closure_rec(g, c, t, budget));
  return t;
}

/// Copies the subtree of src rooted at v into dst; returns the new index.
inline int graft(DecisionTree& dst, const DecisionTree& src, int v) {
  const TreeNode& n = src.node(v);
  if (n.is_leaf()) return dst.add_leaf(n.label);
  int a = graft(dst, src, n.child0);
  int b = graft(dst, src, n.child1);
  return dst.add_internal(n.query, a, b);
}

// ---------------------------------------------------------------------------
// min_sep_tree

using PairDist = std::map<std::pair<std::string, std::string>, Rat>;

struct SepOptResult {
  Rat value;  // exact min over computing trees of E[sep]
  DecisionTree tree;
};

/// Expected separation depth equals the sum over tree nodes of the mass of
/// pairs still unseparated there, which the recursion minimizes directly.
inline SepOptResult min_sep_tree(const PartialFunction& g, const PairDist& p,
                                 const TreeSearchBudget& budget = {}) {
  Rat total = 0;
  for (const auto& [pr, w] : p) {
    const auto& [x, y] = pr;
    if (x == y) throw PairError("pair with x = y");
    if (g.evaluate(x) != GValue::zero || g.evaluate(y) != GValue::one)
      throw PairError("pair not cross-labeled valid: (" + x + "," + y + ")");
    if (w < 0) throw DomainError("negative pair weight");
    total += w;
  }
  if (total != 1) throw DomainError("pair distribution mass != 1");
  detail::check_dp_instance(g.arity(), budget);

  auto alive_mass = [&](const Subcube& c) {
    Rat mass = 0;
    for (const auto& [pr, w] : p)
      if (w > 0 && c.contains(pr.first) && c.contains(pr.second)) mass += w;
    return mass;
  };

  std::unordered_map<std::string, Rat> memo;
  auto rec = [&](auto&& self, const Subcube& c) -> Rat {
    Rat mass = alive_mass(c);
    if (mass == 0) return Rat(0);
    auto it = memo.find(c.key());
    if (it != memo.end()) return it->second;
    if (memo.size() >= budget.memo_cap) throw BudgetError("memo cap exceeded");
    Rat best;
    bool first = true;
    for (int i : c.free_indices()) {
      Rat v = self(self, c.fix(i, 0)) + self(self, c.fix(i, 1));
      if (first || v < best) {
        best = v;
        first = false;
      }
    }
    if (first) throw DefectError("alive pair on a point subcube");
    Rat value = mass + best;
    memo.emplace(c.key(), value);
    return value;
  };

  DecisionTree tree(g.arity());
  auto build = [&](auto&& self, const Subcube& c) -> int {
    if (alive_mass(c) == 0) {
      DecisionTree done = closure_tree(g, c, budget);
      return graft(tree, done, done.root());
    }
    Rat want = rec(rec, c) - alive_mass(c);
    for (int i : c.free_indices()) {
      Subcube c0 = c.fix(i, 0), c1 = c.fix(i, 1);
      if (rec(rec, c0) + rec(rec, c1) == want)
        return tree.add_internal(i, self(self, c0), self(self, c1));
    }
    throw DefectError("min_sep_tree witness reconstruction failed");
  };

  Subcube full = Subcube::full(g.arity());
  Rat value = rec(rec, full);
  tree.set_root(build(build, full));
  return {value, std::move(tree)};
}

// ---------------------------------------------------------------------------
// min_chi_tree

struct ChiOptResult {
  Rat value;  // exact min over computing trees of the expected walk length
  DecisionTree tree;
};

/// Expected conflict-walk length, minimized by recursion on subcubes.  The
/// walk enters a child only with the smaller of the two conditional branch
/// probabilities, so one-sided children are never recursed into.
inline ChiOptResult min_chi_tree(const DistPair& pair,
                                 const TreeSearchBudget& budget = {},
                                 const PartialFunction* g = nullptr) {
  detail::check_dp_instance(pair.arity(), budget);
  PartialFunction target =
      g ? *g : PairMixture::singleton(pair).implied_function();
  if (g && !pair.consistent_with(*g))
    throw PairError("pair not consistent with the function");

  std::unordered_map<std::string, std::pair<Rat, int>> memo;  // value, query
  auto rec = [&](auto&& self, const Subcube& c, const Dist& mu0,
                 const Dist& mu1) -> Rat {
    auto it = memo.find(c.key());
    if (it != memo.end()) return it->second.first;
    if (memo.size() >= budget.memo_cap) throw BudgetError("memo cap exceeded");
    Rat best;
    int best_i = -1;
    for (int i : c.free_indices()) {
      Rat p0 = mu0.prob_bit0(i), p1 = mu1.prob_bit0(i);
      Rat a = rat_min(p0, p1);
      Rat b = 1 - rat_max(p0, p1);
      Rat v = 1;
      if (a > 0) {
        Subcube c0 = c.fix(i, 0);
        v += a * self(self, c0, mu0.conditioned(c0), mu1.conditioned(c0));
      }
      if (b > 0) {
        Subcube c1 = c.fix(i, 1);
        v += b * self(self, c1, mu0.conditioned(c1), mu1.conditioned(c1));
      }
      if (best_i < 0 || v < best) {
        best = v;
        best_i = i;
      }
    }
    if (best_i < 0)
      throw DefectError("both supports alive on a point subcube");
    memo.emplace(c.key(), std::make_pair(best, best_i));
    return best;
  };

  DecisionTree tree(pair.arity());
  auto build = [&](auto&& self, const Subcube& c, const Dist& mu0,
                   const Dist& mu1) -> int {
    rec(rec, c, mu0, mu1);
    int i = memo.at(c.key()).second;
    Rat p0 = mu0.prob_bit0(i), p1 = mu1.prob_bit0(i);
    Subcube c0 = c.fix(i, 0), c1 = c.fix(i, 1);
    int a, b;
    if (rat_min(p0, p1) > 0)
      a = self(self, c0, mu0.conditioned(c0), mu1.conditioned(c0));
    else {
      DecisionTree done = closure_tree(target, c0, budget);
      a = graft(tree, done, done.root());
    }
    if (1 - rat_max(p0, p1) > 0)
      b = self(self, c1, mu0.conditioned(c1), mu1.conditioned(c1));
    else {
      DecisionTree done = closure_tree(target, c1, budget);
      b = graft(tree, done, done.root());
    }
    return tree.add_internal(i, a, b);
  };

  Subcube full = Subcube::full(pair.arity());
  Rat value = rec(rec, full, pair.mu0, pair.mu1);
  tree.set_root(build(build, full, pair.mu0, pair.mu1));
  return {value, std::move(tree)};
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration (brute-force oracle)

/// Number of distinct trees over `avail` query indices with depth <= d
/// (counting in queries): t(0, a) = 1, t(d, a) = 1 + a * t(d-1, a-1)^2.
inline uint64_t count_trees(int depth, int avail) {
  if (depth == 0 || avail == 0) return 1;
  uint64_t sub = count_trees(depth - 1, avail - 1);
  return 1 + static_cast<uint64_t>(avail) * sub * sub;
}

/// Every structurally distinct tree without repeated queries on a path,
/// leaves unlabeled, exactly once.  Depth counted in queries.
inline std::vector<DecisionTree> enumerate_trees(int m, int max_depth,
                                                 const TreeSearchBudget& budget = {}) {
  if (m < 0) throw ArityError("negative arity");
  if (count_trees(std::min(max_depth, m), m) > budget.max_nodes)
    throw BudgetError("tree enumeration exceeds cap");

  // Subtrees over an index subset, memoized per (mask, depth).
  std::map<std::pair<uint32_t, int>, std::vector<std::string>> memo;
  auto rec = [&](auto&& self, uint32_t mask, int d) -> const std::vector<std::string>& {
    auto key = std::make_pair(mask, d);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<std::string> out{"(leaf)"};
    if (d > 0) {
      for (int i = 1; i <= m; ++i) {
        if (!(mask >> (i - 1) & 1)) continue;
        uint32_t rest = mask & ~(uint32_t{1} << (i - 1));
        const auto& subs = self(self, rest, d - 1);
        for (const auto& l : subs)
          for (const auto& r : subs)
            out.push_back("(q " + std::to_string(i) + " " + l + " " + r + ")");
      }
    }
    return memo.emplace(std::move(key), std::move(out)).first->second;
  };

  uint32_t all = m == 0 ? 0 : (uint32_t{1} << m) - 1;
  std::vector<DecisionTree> trees;
  for (const auto& text : rec(rec, all, std::min(max_depth, m)))
    trees.push_back(DecisionTree::parse_text(text, m));
  return trees;
}

/// Labels every leaf so the tree computes g, if possible: each leaf subcube
/// must have a forced value on the valid inputs it contains.
inline std::optional<DecisionTree> try_label_for(const DecisionTree& t,
                                                 const PartialFunction& g) {
  DecisionTree out = t;
  for (int v : out.leaves()) {
    auto [ok, lbl] = pf_closing_label(g, out.subcube_of(v));
    if (!ok) return std::nullopt;
    out.set_label(v, lbl);
  }
  return out;
}

}  // namespace qclab
