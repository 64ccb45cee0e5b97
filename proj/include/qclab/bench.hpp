#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "qclab/io.hpp"
#include "qclab/rng.hpp"
#include "qclab/simproc.hpp"

namespace qclab {

// ---------------------------------------------------------------------------
// Small standard functions used across benchmarks and property suites.

inline PartialFunction make_or2() {
  return PartialFunction(2, {"00"}, {"01", "10", "11"});
}
inline PartialFunction make_and2() {
  return PartialFunction(2, {"00", "01", "10"}, {"11"});
}
inline PartialFunction make_xor2() {
  return PartialFunction(2, {"00", "11"}, {"01", "10"});
}
inline PartialFunction make_maj3() {
  return PartialFunction(3, {"000", "001", "010", "100"},
                         {"011", "101", "110", "111"});
}

/// {(z, parity(z))} over k bits.
inline Relation make_parity_relation(int k) {
  std::set<std::pair<std::string, std::string>> members;
  for (const auto& z : all_strings(k))
    members.emplace(z, hamming_weight(z) % 2 ? "1" : "0");
  return Relation(k, {"0", "1"}, std::move(members));
}

/// {(z, z)} over k bits.
inline Relation make_identity_relation(int k) {
  std::set<std::pair<std::string, std::string>> members;
  auto all = all_strings(k);
  for (const auto& z : all) members.emplace(z, z);
  return Relation(k, all, std::move(members));
}

// ---------------------------------------------------------------------------
// The tightness pair: an XOR-distance threshold relation and a Hamming-weight
// promise function, solved by per-block majority probing.

inline Relation make_f0(int n) { return Relation::xor_distance_threshold(n); }

inline PartialFunction make_g0(int n) {
  if (n <= 0) throw ArityError("make_g0 needs n >= 1");
  PartialFunction g = PartialFunction::weight_threshold(n);
  if (n <= 16) return g.materialize();
  return g;
}

struct ProbeConfig {
  int n = 0;           // block size (and block count)
  Rat epsilon;         // target error
  int t = 0;           // odd probe count per block
  int trials = 0;
  uint64_t seed = 0;

  void check() const {
    if (t % 2 == 0) throw DomainError("probe count must be odd");
    // The per-block advantage bound needs t/(4 sqrt n) <= 1/4, i.e. t^2 <= n.
    if (static_cast<int64_t>(t) * t > n)
      throw DomainError("probe count too large for the block size");
  }
};

/// Smallest odd t >= 9 with exp(-((t/8 - 1)^2) / 2) <= eps, subject to the
/// regime constraint t <= sqrt(n).  Throws naming the minimal feasible n when
/// the constraint cannot be met.
inline int choose_t(const Rat& epsilon, int n) {
  if (epsilon <= 0 || epsilon >= 1) throw DomainError("epsilon must lie in (0,1)");
  if (n <= 0) throw ArityError("choose_t needs n >= 1");
  const double log_eps = std::log(rat_double(epsilon));
  int t = 9;
  for (;; t += 2) {
    double e = t / 8.0 - 1.0;
    if (-0.5 * e * e <= log_eps) break;
  }
  if (static_cast<int64_t>(t) * t > n)
    throw InfeasibleError("probe count " + std::to_string(t) +
                          " infeasible at n = " + std::to_string(n) +
                          "; minimal feasible n is " + std::to_string(t * t));
  return t;
}

struct ProbeResult {
  std::string answer;
  int64_t probes = 0;
};

/// Majority vote over t uniformly random probes per block (positions drawn
/// with replacement, independent across blocks).  Probes are counted as made;
/// the total is always t * block count.
inline ProbeResult majority_probe(const std::vector<std::string>& blocks, int t,
                                  Rng& rng) {
  if (t % 2 == 0) throw DomainError("probe count must be odd");
  ProbeResult out;
  out.answer.assign(blocks.size(), '0');
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string& x = blocks[i];
    int ones = 0;
    for (int k = 0; k < t; ++k) {
      ones += x[static_cast<size_t>(rng.below(x.size()))] == '1';
      ++out.probes;
    }
    out.answer[i] = ones * 2 > t ? '1' : '0';
  }
  return out;
}

/// Exact probability that the per-block majority recovers the promised value
/// for a block of weight w: a binomial tail with success probability w/n
/// (answer 1) or (n-w)/n (answer 0).
inline Rat majority_success_prob(int n, int w, int t) {
  const bool expect_one = 2 * w > n;
  Rat p = expect_one ? Rat(w, n) : Rat(n - w, n);
  // Pr[more than t/2 of t iid Bernoulli(p) successes]
  Rat total = 0;
  BigInt binom = 1;
  std::vector<BigInt> binoms(static_cast<size_t>(t) + 1);
  for (int k = 0; k <= t; ++k) {
    binoms[static_cast<size_t>(k)] = binom;
    binom = binom * (t - k) / (k + 1);
  }
  for (int k = t / 2 + 1; k <= t; ++k) {
    Rat term = Rat(binoms[static_cast<size_t>(k)]);
    for (int a = 0; a < k; ++a) term *= p;
    for (int a = 0; a < t - k; ++a) term *= 1 - p;
    total += term;
  }
  return total;
}

struct F0G0Report {
  int n = 0;
  int t = 0;
  int trials = 0;
  int failures = 0;
  int64_t queries_per_trial = 0;
  double failure_rate = 0;
  double sigma = 0;  // binomial std error of the rate estimate
};

/// Monte Carlo run of the majority-probe protocol on worst-case inputs:
/// every block sits exactly at weight n/2 - sqrt(n) or n/2 + sqrt(n) (when
/// sqrt(n) is integral), the binding case of the per-block advantage bound.
/// Probes see positions uniformly at random, so the canonical arrangement
/// 1^w 0^(n-w) loses no generality.  Trials use per-index substreams; results
/// are deterministic given the seed and independent of scheduling.
inline F0G0Report run_f0g0(int n, const Rat& epsilon, int trials, uint64_t seed,
                           int max_threads = 1) {
  ProbeConfig cfg;
  cfg.n = n;
  cfg.epsilon = epsilon;
  cfg.t = choose_t(epsilon, n);
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.check();

  const int64_t root = static_cast<int64_t>(std::llround(std::sqrt(double(n))));
  if (root * root != n)
    throw DomainError("worst-case generator wants n to be a perfect square");
  const int w_low = static_cast<int>(n / 2 - root);
  const int w_high = static_cast<int>(n / 2 + root);
  const std::string block_low = std::string(w_low, '1') + std::string(n - w_low, '0');
  const std::string block_high = std::string(w_high, '1') + std::string(n - w_high, '0');

  // Failure threshold: the answer is wrong when the number of per-block
  // mistakes exceeds n/2 - sqrt(n).
  const int64_t allowed = n / 2 - root;

  std::vector<char> failed(static_cast<size_t>(trials), 0);
  auto run_trial = [&](int k) {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(k));
    std::vector<std::string> blocks;
    std::string z(static_cast<size_t>(n), '0');
    blocks.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      bool one = rng.below(2) == 1;
      z[static_cast<size_t>(i)] = one ? '1' : '0';
      blocks.push_back(one ? block_high : block_low);
    }
    ProbeResult probe = majority_probe(blocks, cfg.t, rng);
    if (probe.probes != static_cast<int64_t>(cfg.t) * n)
      throw DefectError("probe count differs from t * n");
    int64_t wrong = 0;
    for (int i = 0; i < n; ++i)
      wrong += probe.answer[static_cast<size_t>(i)] != z[static_cast<size_t>(i)];
    failed[static_cast<size_t>(k)] = wrong > allowed ? 1 : 0;
  };

  int threads = std::max(1, std::min<int>(max_threads, static_cast<int>(std::thread::hardware_concurrency())));
  if (threads <= 1 || trials < 2 * threads) {
    for (int k = 0; k < trials; ++k) run_trial(k);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int k = next.fetch_add(1); k < trials; k = next.fetch_add(1)) run_trial(k);
      });
    for (auto& th : pool) th.join();
  }

  F0G0Report rep;
  rep.n = n;
  rep.t = cfg.t;
  rep.trials = trials;
  rep.queries_per_trial = static_cast<int64_t>(cfg.t) * n;
  for (char f : failed) rep.failures += f;
  rep.failure_rate = trials ? double(rep.failures) / trials : 0.0;
  rep.sigma = trials ? std::sqrt(std::max(rep.failure_rate * (1 - rep.failure_rate), 1.0 / trials) / trials)
                     : 0.0;
  return rep;
}

}  // namespace qclab
