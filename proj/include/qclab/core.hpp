#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qclab/rational.hpp"

namespace qclab {

// Inputs are ASCII '0'/'1' strings; index 1 is the leftmost character.

inline constexpr size_t kDefaultEnumerationCap = size_t{1} << 16;

inline void check_bits(std::string_view x) {
  for (char c : x)
    if (c != '0' && c != '1') throw ParseError("not a bit string");
}

/// Bit at 1-based index i.
inline int bit_at(std::string_view x, int i) {
  if (i < 1 || static_cast<size_t>(i) > x.size())
    throw ArityError("bit index out of range");
  return x[static_cast<size_t>(i) - 1] - '0';
}

inline int hamming_weight(std::string_view x) {
  return static_cast<int>(std::count(x.begin(), x.end(), '1'));
}

/// All length-m bit strings in lexicographic order.  Guarded by cap.
inline std::vector<std::string> all_strings(int m,
                                            size_t cap = kDefaultEnumerationCap) {
  if (m < 0) throw ArityError("negative arity");
  if (m >= 63 || (size_t{1} << m) > cap)
    throw BudgetError("enumeration of 2^" + std::to_string(m) +
                      " strings exceeds cap");
  std::vector<std::string> out;
  out.reserve(size_t{1} << m);
  for (size_t v = 0; v < (size_t{1} << m); ++v) {
    std::string s(static_cast<size_t>(m), '0');
    for (int i = 0; i < m; ++i)
      if (v >> (m - 1 - i) & 1) s[static_cast<size_t>(i)] = '1';
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcube

/// Strings with some coordinates fixed; stored as a mask over {'0','1','*'}.
class Subcube {
 public:
  static Subcube full(int m) {
    Subcube c;
    c.mask_.assign(static_cast<size_t>(m), '*');
    return c;
  }

  int arity() const { return static_cast<int>(mask_.size()); }
  int codim() const {
    return static_cast<int>(mask_.size() -
                            std::count(mask_.begin(), mask_.end(), '*'));
  }
  bool fixes(int i) const { return mask_.at(static_cast<size_t>(i) - 1) != '*'; }
  int fixed_bit(int i) const {
    char c = mask_.at(static_cast<size_t>(i) - 1);
    if (c == '*') throw DomainError("coordinate not fixed");
    return c - '0';
  }

  bool contains(std::string_view x) const {
    if (x.size() != mask_.size()) throw ArityError("subcube/string arity mismatch");
    for (size_t k = 0; k < mask_.size(); ++k)
      if (mask_[k] != '*' && mask_[k] != x[k]) return false;
    return true;
  }

  Subcube fix(int i, int b) const {
    if (i < 1 || static_cast<size_t>(i) > mask_.size())
      throw ArityError("fix index out of range");
    if (fixes(i)) throw StructureError("coordinate already fixed");
    Subcube c = *this;
    c.mask_[static_cast<size_t>(i) - 1] = static_cast<char>('0' + (b & 1));
    return c;
  }

  std::vector<int> free_indices() const {
    std::vector<int> out;
    for (int i = 1; i <= arity(); ++i)
      if (!fixes(i)) out.push_back(i);
    return out;
  }

  /// Canonical encoding, usable as a memo key.
  const std::string& key() const { return mask_; }

  /// All member strings (2^(m-codim) of them), cap-guarded.
  std::vector<std::string> members(size_t cap = kDefaultEnumerationCap) const {
    int free = arity() - codim();
    if (free >= 63 || (size_t{1} << free) > cap)
      throw BudgetError("subcube enumeration exceeds cap");
    std::vector<std::string> out;
    std::string cur(mask_);
    auto rec = [&](auto&& self, size_t pos) -> void {
      while (pos < cur.size() && mask_[pos] != '*') ++pos;
      if (pos == cur.size()) {
        out.push_back(cur);
        return;
      }
      for (char b : {'0', '1'}) {
        cur[pos] = b;
        self(self, pos + 1);
      }
      cur[pos] = '*';
    };
    rec(rec, 0);
    return out;
  }

  friend bool operator==(const Subcube&, const Subcube&) = default;

 private:
  std::string mask_;
};

// ---------------------------------------------------------------------------
// PartialFunction

enum class GValue { zero, one, invalid };

inline std::string to_string(GValue v) {
  switch (v) {
    case GValue::zero: return "0";
    case GValue::one: return "1";
    default: return "invalid";
  }
}

/// Promise Boolean function given by explicit preimages, or by the
/// Hamming-weight threshold rule (valid when the weight is at least sqrt(n)
/// away from n/2) for instances too large to enumerate.
class PartialFunction {
 public:
  PartialFunction(int m, std::set<std::string> zeros, std::set<std::string> ones)
      : m_(m), impl_(Explicit{std::move(zeros), std::move(ones)}) {
    if (m < 0) throw ArityError("negative arity");
    const auto& e = std::get<Explicit>(impl_);
    for (const auto& s : {std::cref(e.zeros), std::cref(e.ones)})
      for (const auto& x : s.get()) {
        check_bits(x);
        if (x.size() != static_cast<size_t>(m))
          throw ArityError("preimage string of wrong length");
      }
    for (const auto& x : e.zeros)
      if (e.ones.count(x)) throw DomainError("zeros and ones overlap");
  }

  static PartialFunction weight_threshold(int n) {
    if (n <= 0) throw ArityError("weight threshold rule needs n >= 1");
    PartialFunction g;
    g.m_ = n;
    g.impl_ = WeightRule{};
    return g;
  }

  int arity() const { return m_; }

  GValue evaluate(std::string_view x) const {
    if (x.size() != static_cast<size_t>(m_))
      throw ArityError("evaluate: string length != arity");
    if (const auto* e = std::get_if<Explicit>(&impl_)) {
      std::string key(x);
      if (e->zeros.count(key)) return GValue::zero;
      if (e->ones.count(key)) return GValue::one;
      return GValue::invalid;
    }
    // |x| <= n/2 - sqrt(n)  <=>  n - 2|x| >= 0 and (n - 2|x|)^2 >= 4n
    const int64_t n = m_;
    const int64_t w = hamming_weight(x);
    const int64_t lo = n - 2 * w, hi = 2 * w - n;
    if (lo >= 0 && lo * lo >= 4 * n) return GValue::zero;
    if (hi >= 0 && hi * hi >= 4 * n) return GValue::one;
    return GValue::invalid;
  }

  bool is_explicit() const { return std::holds_alternative<Explicit>(impl_); }

  // Preimage sets of an explicit instance.  Rule-based instances are meant
  // for evaluation only; enumerating them goes through materialize().
  const std::set<std::string>& zeros() const { return explicit_impl().zeros; }
  const std::set<std::string>& ones() const { return explicit_impl().ones; }

  /// Explicit sets; for rule instances this enumerates 2^m points (cap-guarded).
  PartialFunction materialize(size_t cap = kDefaultEnumerationCap) const {
    if (is_explicit()) return *this;
    std::set<std::string> zs, os;
    for (const auto& x : all_strings(m_, cap)) {
      switch (evaluate(x)) {
        case GValue::zero: zs.insert(x); break;
        case GValue::one: os.insert(x); break;
        default: break;
      }
    }
    return PartialFunction(m_, std::move(zs), std::move(os));
  }

 private:
  struct Explicit {
    std::set<std::string> zeros, ones;
  };
  struct WeightRule {};

  PartialFunction() = default;

  const Explicit& explicit_impl() const {
    if (const auto* e = std::get_if<Explicit>(&impl_)) return *e;
    throw BudgetError("rule-based function needs explicit enumeration; materialize() first");
  }

  int m_ = 0;
  std::variant<Explicit, WeightRule> impl_;
};

// ---------------------------------------------------------------------------
// Relation

/// Relation over n-bit inputs and an opaque label alphabet.  Membership is
/// always a predicate; explicit tables, the XOR-distance threshold rule, and
/// composed relations share the same interface.
class Relation {
 public:
  Relation(int n, std::vector<std::string> outputs,
           std::set<std::pair<std::string, std::string>> members,
           bool check_total = true, size_t cap = kDefaultEnumerationCap)
      : n_(n) {
    Explicit e;
    e.outputs = std::move(outputs);
    e.members = std::move(members);
    for (const auto& [z, s] : e.members) {
      check_bits(z);
      if (z.size() != static_cast<size_t>(n))
        throw ArityError("relation member of wrong arity");
      if (std::find(e.outputs.begin(), e.outputs.end(), s) == e.outputs.end())
        throw DomainError("relation member with unknown output label");
    }
    impl_ = std::make_shared<Impl>(Impl{std::move(e)});
    if (check_total && n >= 0 && n < 63 && (size_t{1} << n) <= cap) {
      for (const auto& z : all_strings(n, cap)) {
        bool any = false;
        for (const auto& s : this->outputs(cap))
          if (contains(z, s)) {
            any = true;
            break;
          }
        if (!any)
          throw DomainError("relation not total: no output for " + z);
      }
    }
  }

  /// (a, z) pairs with |a xor z| <= n/2 - sqrt(n); outputs are all n-bit
  /// strings.  Total exactly when n >= 4 (a = z is always a member then).
  static Relation xor_distance_threshold(int n) {
    if (n <= 0) throw ArityError("xor distance rule needs n >= 1");
    if (n < 4)
      throw InfeasibleError(
          "xor distance threshold relation is empty below n = 4");
    Relation r;
    r.n_ = n;
    r.impl_ = std::make_shared<Impl>(Impl{XorRule{}});
    return r;
  }

  static Relation composed(Relation f, PartialFunction g, int blocks) {
    if (blocks <= 0) throw ArityError("composition needs >= 1 block");
    if (f.arity() != blocks)
      throw ArityError("outer relation arity != block count");
    Relation r;
    r.n_ = blocks * g.arity();
    Composed c{std::make_shared<Relation>(std::move(f)),
               std::make_shared<PartialFunction>(std::move(g)), blocks};
    r.impl_ = std::make_shared<Impl>(Impl{std::move(c)});
    return r;
  }

  int arity() const { return n_; }

  bool contains(std::string_view z, const std::string& s) const {
    if (z.size() != static_cast<size_t>(n_))
      throw ArityError("contains: string length != arity");
    const auto& v = impl_->v;
    if (const auto* e = std::get_if<Explicit>(&v))
      return e->members.count({std::string(z), s}) != 0;
    if (std::get_if<XorRule>(&v)) {
      if (s.size() != static_cast<size_t>(n_)) return false;
      for (char c : s)
        if (c != '0' && c != '1') return false;
      const int64_t n = n_;
      int64_t w = 0;
      for (int i = 0; i < n_; ++i)
        w += (z[static_cast<size_t>(i)] != s[static_cast<size_t>(i)]) ? 1 : 0;
      const int64_t lo = n - 2 * w;
      return lo >= 0 && lo * lo >= 4 * n;
    }
    const auto& c = std::get<Composed>(v);
    const int m = c.g->arity();
    std::string gvals(static_cast<size_t>(c.blocks), '0');
    for (int i = 0; i < c.blocks; ++i) {
      GValue gv = c.g->evaluate(z.substr(static_cast<size_t>(i) * m,
                                         static_cast<size_t>(m)));
      if (gv == GValue::invalid) return true;  // any output accepted
      gvals[static_cast<size_t>(i)] = gv == GValue::zero ? '0' : '1';
    }
    return c.f->contains(gvals, s);
  }

  /// Output alphabet.  For rule-based relations this enumerates it
  /// (cap-guarded); composed relations inherit the outer alphabet.
  std::vector<std::string> outputs(size_t cap = kDefaultEnumerationCap) const {
    const auto& v = impl_->v;
    if (const auto* e = std::get_if<Explicit>(&v)) return e->outputs;
    if (std::get_if<XorRule>(&v)) return all_strings(n_, cap);
    return std::get<Composed>(v).f->outputs(cap);
  }

 private:
  struct Explicit {
    std::vector<std::string> outputs;
    std::set<std::pair<std::string, std::string>> members;
  };
  struct XorRule {};
  struct Composed {
    std::shared_ptr<const Relation> f;
    std::shared_ptr<const PartialFunction> g;
    int blocks;
  };
  struct Impl {
    std::variant<Explicit, XorRule, Composed> v;
  };

  Relation() = default;

  int n_ = 0;
  std::shared_ptr<const Impl> impl_;
};

inline Relation compose(const Relation& f, const PartialFunction& g, int n) {
  return Relation::composed(f, g, n);
}

/// The {0,1}-output relation of a partial function: invalid inputs accept
/// both outputs.
inline bool pf_accepts(const PartialFunction& g, std::string_view x,
                       const std::string& s) {
  if (s != "0" && s != "1") return false;
  GValue v = g.evaluate(x);
  if (v == GValue::invalid) return true;
  return (v == GValue::zero) == (s == "0");
}

// ---------------------------------------------------------------------------
// Dist / DistPair / PairMixture

/// Probability distribution on m-bit strings with exact rational weights.
/// Only positive weights are stored; they sum to exactly 1.
class Dist {
 public:
  Dist(int m, std::map<std::string, Rat> weights) : m_(m), w_(std::move(weights)) {
    Rat total = 0;
    for (auto it = w_.begin(); it != w_.end();) {
      check_bits(it->first);
      if (it->first.size() != static_cast<size_t>(m))
        throw ArityError("distribution point of wrong length");
      if (it->second < 0) throw DomainError("negative weight");
      if (it->second == 0) {
        it = w_.erase(it);
        continue;
      }
      total += it->second;
      ++it;
    }
    if (w_.empty()) throw DomainError("distribution with empty support");
    if (total != 1) throw DomainError("weights sum to " + rat_str(total));
  }

  static Dist point(const std::string& x) {
    return Dist(static_cast<int>(x.size()), {{x, Rat(1)}});
  }

  template <typename Container>
  static Dist uniform(const Container& pts) {
    std::map<std::string, Rat> w;
    size_t n = std::distance(std::begin(pts), std::end(pts));
    if (n == 0) throw DomainError("uniform distribution over empty set");
    for (const auto& x : pts) w[x] = Rat(1, static_cast<unsigned>(n));
    return Dist(static_cast<int>(std::begin(pts)->size()), std::move(w));
  }

  int arity() const { return m_; }
  const std::map<std::string, Rat>& weights() const { return w_; }

  Rat mass_in(const Subcube& c) const {
    Rat t = 0;
    for (const auto& [x, w] : w_)
      if (c.contains(x)) t += w;
    return t;
  }

  Rat prob(std::string_view x) const {
    auto it = w_.find(std::string(x));
    return it == w_.end() ? Rat(0) : it->second;
  }

  /// Pr[x_i = 0] for 1-based i.
  Rat prob_bit0(int i) const {
    Rat t = 0;
    for (const auto& [x, w] : w_)
      if (bit_at(x, i) == 0) t += w;
    return t;
  }

  Dist conditioned(const Subcube& c) const {
    Rat total = mass_in(c);
    if (total == 0)
      throw ConditioningError("conditioning on zero-mass subcube " + c.key());
    std::map<std::string, Rat> w;
    for (const auto& [x, wt] : w_)
      if (c.contains(x)) w[x] = wt / total;
    return Dist(m_, std::move(w));
  }

  std::set<std::string> support() const {
    std::set<std::string> s;
    for (const auto& [x, _] : w_) s.insert(x);
    return s;
  }

  friend bool operator==(const Dist&, const Dist&) = default;

 private:
  int m_;
  std::map<std::string, Rat> w_;
};

inline Dist condition(const Dist& d, const Subcube& c) { return d.conditioned(c); }

/// (mu0, mu1) with disjoint supports.
struct DistPair {
  Dist mu0;
  Dist mu1;

  DistPair(Dist m0, Dist m1) : mu0(std::move(m0)), mu1(std::move(m1)) {
    if (mu0.arity() != mu1.arity()) throw ArityError("pair arity mismatch");
    for (const auto& [x, _] : mu0.weights())
      if (mu1.prob(x) > 0)
        throw PairError("pair supports intersect at " + x);
  }

  int arity() const { return mu0.arity(); }

  bool consistent_with(const PartialFunction& g) const {
    for (const auto& [x, _] : mu0.weights())
      if (g.evaluate(x) != GValue::zero) return false;
    for (const auto& [x, _] : mu1.weights())
      if (g.evaluate(x) != GValue::one) return false;
    return true;
  }

  friend bool operator==(const DistPair&, const DistPair&) = default;
};

/// Finite mixture of distribution pairs; supp0 and supp1 never intersect.
class PairMixture {
 public:
  explicit PairMixture(std::vector<std::pair<Rat, DistPair>> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw DomainError("empty mixture");
    Rat total = 0;
    int m = entries_.front().second.arity();
    for (const auto& [w, p] : entries_) {
      if (w <= 0) throw DomainError("mixture weight must be positive");
      if (p.arity() != m) throw ArityError("mixture arity mismatch");
      total += w;
    }
    if (total != 1) throw DomainError("mixture weights sum to " + rat_str(total));
    auto s0 = supp0(), s1 = supp1();
    for (const auto& x : s0)
      if (s1.count(x))
        throw ConsistencyError("mixture supports intersect at " + x);
  }

  static PairMixture singleton(DistPair p) {
    std::vector<std::pair<Rat, DistPair>> e;
    e.emplace_back(Rat(1), std::move(p));
    return PairMixture(std::move(e));
  }

  int arity() const { return entries_.front().second.arity(); }
  const std::vector<std::pair<Rat, DistPair>>& entries() const { return entries_; }

  std::set<std::string> supp0() const {
    std::set<std::string> s;
    for (const auto& [_, p] : entries_)
      for (const auto& [x, w] : p.mu0.weights()) s.insert(x);
    return s;
  }
  std::set<std::string> supp1() const {
    std::set<std::string> s;
    for (const auto& [_, p] : entries_)
      for (const auto& [x, w] : p.mu1.weights()) s.insert(x);
    return s;
  }

  bool consistent_with(const PartialFunction& g) const {
    for (const auto& [_, p] : entries_)
      if (!p.consistent_with(g)) return false;
    return true;
  }

  /// The partial function whose preimages are exactly the mixture supports.
  PartialFunction implied_function() const {
    return PartialFunction(arity(), supp0(), supp1());
  }

 private:
  std::vector<std::pair<Rat, DistPair>> entries_;
};

inline GValue evaluate(const PartialFunction& g, std::string_view x) {
  return g.evaluate(x);
}

}  // namespace qclab
