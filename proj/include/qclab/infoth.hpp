#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "qclab/rational.hpp"

namespace qclab {

// The one floating-point corner of the library: identities involving
// logarithms are checked to 1e-9, never exactly.

inline constexpr double kInfoTol = 1e-9;

/// Joint distribution of finitely many variables; probabilities indexed by
/// value tuples.  Base-2 logarithms throughout, 0 log 0 = 0.
struct JointTable {
  std::vector<int> arities;             // variable i takes values 0..arities[i)-1
  std::map<std::vector<int>, double> p;

  JointTable(std::vector<int> ar, std::map<std::vector<int>, double> probs)
      : arities(std::move(ar)), p(std::move(probs)) {
    double total = 0;
    for (const auto& [key, w] : p) {
      if (key.size() != arities.size())
        throw ArityError("joint table key of wrong length");
      for (size_t i = 0; i < key.size(); ++i)
        if (key[i] < 0 || key[i] >= arities[i])
          throw DomainError("joint table value out of range");
      if (w < 0) throw DomainError("negative probability");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw DomainError("joint table mass differs from 1 by more than 1e-12");
  }

  /// Marginal over the given variable subset, keyed by their values in order.
  std::map<std::vector<int>, double> marginal(const std::vector<int>& vars) const {
    std::map<std::vector<int>, double> out;
    for (const auto& [key, w] : p) {
      std::vector<int> sub;
      sub.reserve(vars.size());
      for (int v : vars) sub.push_back(key.at(static_cast<size_t>(v)));
      out[sub] += w;
    }
    return out;
  }
};

inline double entropy_of(const std::map<std::vector<int>, double>& dist) {
  double h = 0;
  for (const auto& [key, w] : dist)
    if (w > 0) h -= w * std::log2(w);
  return h;
}

inline double entropy(const JointTable& t, const std::vector<int>& vars) {
  return entropy_of(t.marginal(vars));
}

/// I(X;Y | Z) = H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z).
inline double mutual_information(const JointTable& t, std::vector<int> xs,
                                 std::vector<int> ys, std::vector<int> zs = {}) {
  auto cat = [](std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  double hxz = entropy(t, cat(xs, zs));
  double hyz = entropy(t, cat(ys, zs));
  double hxyz = entropy(t, cat(cat(xs, ys), zs));
  double hz = zs.empty() ? 0.0 : entropy(t, zs);
  return hxz + hyz - hz - hxyz;
}

/// KL divergence in bits; +infinity signals a support violation.
inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ArityError("kl: size mismatch");
  double d = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (q[i] == 0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

inline double l1(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ArityError("l1: size mismatch");
  double d = 0;
  for (size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

struct PinskerCheck {
  double lhs = 0;  // KL divergence
  double rhs = 0;  // half the squared L1 distance
  bool holds = false;
};

inline PinskerCheck pinsker_check(const std::vector<double>& p,
                                  const std::vector<double>& q) {
  PinskerCheck c;
  c.lhs = kl(p, q);
  double d = l1(p, q);
  c.rhs = 0.5 * d * d;
  c.holds = c.lhs >= c.rhs - kInfoTol;
  return c;
}

struct MutinCheck {
  double mi = 0;
  double bound = 0;
  bool holds = false;
};

/// Builds the joint of (b, x) with Pr[b=0] = pb0, Pr[x=0 | b] = p_b, and
/// compares the mutual information against 8 (pb0 (1-pb0) |p0-p1|)^2.
inline MutinCheck mutin_check(double pb0, double p0, double p1) {
  for (double v : {pb0, p0, p1})
    if (v < 0 || v > 1) throw DomainError("mutin_check arguments outside [0,1]");
  std::map<std::vector<int>, double> joint;
  joint[{0, 0}] = pb0 * p0;
  joint[{0, 1}] = pb0 * (1 - p0);
  joint[{1, 0}] = (1 - pb0) * p1;
  joint[{1, 1}] = (1 - pb0) * (1 - p1);
  JointTable t({2, 2}, std::move(joint));
  MutinCheck c;
  c.mi = mutual_information(t, {0}, {1});
  double base = pb0 * (1 - pb0) * std::abs(p0 - p1);
  c.bound = 8 * base * base;
  c.holds = c.mi >= c.bound - kInfoTol;
  return c;
}

}  // namespace qclab
