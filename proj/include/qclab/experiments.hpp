#pragma once

#include <functional>
#include <map>
#include <string>

#include "qclab/verify.hpp"

namespace qclab {

// ---------------------------------------------------------------------------
// Measure reports

struct MeasureOptions {
  Rat epsilon = Rat(1, 3);
  std::optional<Dist> mu;  // adds a distributional row when present
  uint64_t seed = 0;
  TreeSearchBudget budget;
  size_t pair_cap = 4096;
};

/// One row per measure: value plus a provenance tag, "budget" when the
/// instance exceeds the configured caps.
inline Table measure_table(const PartialFunction& g, const MeasureOptions& opt = {}) {
  Table t;
  t.header = {"measure", "value", "tag"};
  auto add = [&](const std::string& name, std::function<std::pair<std::string, std::string>()> fn) {
    try {
      auto [value, tag] = fn();
      t.rows.push_back({name, value, tag});
    } catch (const BudgetError&) {
      t.rows.push_back({name, "budget", "budget"});
    }
  };

  add("D", [&] {
    auto r = optimal_depth(g, opt.budget);
    return std::pair{std::to_string(r.depth), std::string("exact")};
  });
  if (opt.mu) {
    add("D_mu_eps", [&] {
      int l = distributional_complexity(Problem::of(g), *opt.mu, opt.epsilon, opt.budget);
      return std::pair{std::to_string(l), std::string("exact")};
    });
  }
  add("R_eps", [&] {
    auto r = randomized_complexity(Problem::of(g), opt.epsilon, opt.budget);
    return std::pair{std::to_string(r.value),
                     std::string(r.certified ? "exact" : "non-certified")};
  });
  add("RS", [&] {
    auto r = sabotage(g, opt.budget, opt.pair_cap);
    return std::pair{rat_str(r.value),
                     std::string(r.certified ? "exact" : "non-certified")};
  });
  add("chi_lb", [&] {
    auto r = chi_search(g, 32, 16, opt.seed, opt.budget);
    return std::pair{rat_str(r.value), std::string("lower-bound")};
  });
  add("chibar_lb", [&] {
    auto r = chibar_lower_bound(g, default_chibar_candidates(g), opt.budget);
    return std::pair{rat_str(r.value),
                     std::string(r.certified ? "lower-bound" : "non-certified")};
  });
  return t;
}

// ---------------------------------------------------------------------------
// Registered experiments

namespace detail {

inline uint64_t spec_seed(const Json& spec) {
  return spec.contains("seed") ? spec["seed"].get<uint64_t>() : 0;
}

inline Table experiment_measure_catalog(const Json& spec) {
  Table t;
  t.header = {"function", "D", "D_tag", "R_1/3", "R_tag", "RS", "RS_tag",
              "chi_lb", "chi_tag", "chibar_lb", "chibar_tag"};
  MeasureOptions opt;
  opt.seed = spec_seed(spec);
  for (auto& [name, g] : standard_catalog()) {
    Table row = measure_table(g, opt);
    std::map<std::string, std::pair<std::string, std::string>> cells;
    for (const auto& r : row.rows) cells[r[0]] = {r[1], r[2]};
    t.rows.push_back({name, cells["D"].first, cells["D"].second,
                      cells["R_eps"].first, cells["R_eps"].second,
                      cells["RS"].first, cells["RS"].second,
                      cells["chi_lb"].first, cells["chi_lb"].second,
                      cells["chibar_lb"].first, cells["chibar_lb"].second});
  }
  return t;
}

inline Table suite_table(const SuiteResult& r) {
  Table t;
  t.header = {"suite", "checked", "failed", "note", "tag"};
  t.rows.push_back({r.name, std::to_string(r.checked), std::to_string(r.failed),
                    r.note, "exact"});
  return t;
}

inline Table experiment_f0g0(const Json& spec) {
  int n = spec.contains("n") ? spec["n"].get<int>() : 1600;
  int trials = spec.contains("trials") ? spec["trials"].get<int>() : 200;
  Rat eps = spec.contains("epsilon") ? parse_rat(spec["epsilon"].get<std::string>())
                                     : Rat(1, 3);
  int threads = spec.contains("threads") ? spec["threads"].get<int>() : 1;
  F0G0Report rep = run_f0g0(n, eps, trials, spec_seed(spec), threads);
  Table t;
  t.header = {"n", "t", "trials", "failures", "failure_rate", "sigma",
              "queries_per_trial", "tag"};
  t.rows.push_back({std::to_string(rep.n), std::to_string(rep.t),
                    std::to_string(rep.trials), std::to_string(rep.failures),
                    mc_str(rep.failure_rate), mc_str(rep.sigma),
                    std::to_string(rep.queries_per_trial),
                    "monte-carlo(sigma=" + mc_str(rep.sigma) + ")"});
  return t;
}

inline Table experiment_composition(const Json& spec) {
  (void)spec;
  PartialFunction g = make_or2();
  Relation f = make_parity_relation(2);
  auto opt = optimal_depth(compose(f, g, 2));
  auto bound = chibar_lower_bound(g, default_chibar_candidates(g));
  PairMixture q{std::vector<std::pair<Rat, DistPair>>(bound.witness)};
  RandomizedAlgorithm alg = build_process_algorithm(opt.tree, q);
  Table t;
  t.header = {"z", "correct_prob", "expected_queries", "query_bound", "tag"};
  Rat qbound = Rat(opt.depth) / bound.value;
  for (const auto& z : all_strings(2)) {
    auto chart = exact_algorithm_chart(alg, z);
    std::string want = hamming_weight(z) % 2 ? "1" : "0";
    Rat correct = chart.output_dist.count(want) ? chart.output_dist[want] : Rat(0);
    t.rows.push_back({z, rat_str(correct), rat_str(chart.expected_queries),
                      rat_str(qbound), "exact"});
  }
  return t;
}

}  // namespace detail

/// Experiment registry: measure-catalog, simulation-check, direct-sum,
/// composition, f0g0.  Rows are deterministic given the seed.
inline Table run_experiment(const Json& spec) {
  if (!spec.contains("experiment"))
    throw ConfigError("experiment document needs an \"experiment\" field");
  std::string name = spec["experiment"].get<std::string>();
  uint64_t seed = detail::spec_seed(spec);
  auto count = [&](size_t dflt) {
    return spec.contains("count") ? spec["count"].get<size_t>() : dflt;
  };
  if (name == "measure-catalog") return detail::experiment_measure_catalog(spec);
  if (name == "simulation-check")
    return detail::suite_table(verify_simulation(seed, count(200)));
  if (name == "direct-sum")
    return detail::suite_table(verify_direct_sum(seed, count(50)));
  if (name == "composition") return detail::experiment_composition(spec);
  if (name == "f0g0") return detail::experiment_f0g0(spec);
  throw ConfigError("unknown experiment: " + name);
}

// ---------------------------------------------------------------------------
// Determinism suite (needs the experiment registry)

inline SuiteResult verify_determinism(uint64_t seed = 12) {
  SuiteResult res{"determinism"};
  std::vector<Json> specs;
  specs.push_back({{"experiment", "measure-catalog"}, {"seed", seed}});
  specs.push_back({{"experiment", "f0g0"},
                   {"n", 484},
                   {"epsilon", "1/3"},
                   {"trials", 50},
                   {"seed", seed}});
  specs.push_back({{"experiment", "simulation-check"}, {"seed", seed}, {"count", 20}});
  specs.push_back({{"experiment", "direct-sum"}, {"seed", seed}, {"count", 5}});
  specs.push_back({{"experiment", "composition"}, {"seed", seed}});
  for (const auto& spec : specs) {
    std::string a = to_csv(run_experiment(spec));
    std::string b = to_csv(run_experiment(spec));
    ++res.checked;
    if (a != b) res.fail(spec.dump());
  }
  return res;
}

// ---------------------------------------------------------------------------
// Suite registry for the command line and the acceptance gate

struct SuiteSpec {
  std::string name;
  std::function<SuiteResult(uint64_t seed, size_t count)> run;
  size_t default_count;
};

inline std::vector<SuiteSpec> suite_registry() {
  return {
      {"simulation", [](uint64_t s, size_t c) { return verify_simulation(s, c); }, 200},
      {"walk-normalization",
       [](uint64_t s, size_t c) { return verify_walk_normalization(s, c); }, 500},
      {"point-pairs", [](uint64_t s, size_t) { return verify_point_pairs(s); }, 0},
      {"sabotage-game", [](uint64_t s, size_t) { return verify_sabotage_game(s); }, 0},
      {"direct-sum", [](uint64_t s, size_t c) { return verify_direct_sum(s, c); }, 50},
      {"block-counts", [](uint64_t s, size_t c) { return verify_block_counts(s, c); }, 100},
      {"composition", [](uint64_t s, size_t) { return verify_composition(s); }, 0},
      {"truncation", [](uint64_t s, size_t c) { return verify_truncation(s, c); }, 20},
      {"infoth",
       [](uint64_t s, size_t c) { return verify_infoth(s, c, std::max<size_t>(c / 10, 1)); },
       10'000},
      {"pinsker", [](uint64_t s, size_t c) { return verify_pinsker(s, c); }, 10'000},
      {"f0g0", [](uint64_t s, size_t c) { return verify_f0g0(s, 1600, static_cast<int>(c)); }, 200},
      {"oracle-equivalence",
       [](uint64_t s, size_t c) { return verify_oracle_equivalence(s, c); }, 100},
      {"determinism", [](uint64_t s, size_t) { return verify_determinism(s); }, 0},
  };
}

}  // namespace qclab
