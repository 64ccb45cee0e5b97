// Command-line surface: measure computation, property-suite verification,
// process simulation, and benchmark experiments.
//
// Exit codes: 0 success, 1 property-suite failure, 2 input error,
// 3 infeasible configuration, 4 internal defect.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qclab/experiments.hpp"

namespace {

using namespace qclab;

int max_threads_from_env() {
  const char* env = std::getenv("QCLAB_THREADS");
  if (!env) return 1;
  int v = std::atoi(env);
  return v > 0 ? v : 1;
}

void emit(const Table& table, const std::string& format, const std::string& out) {
  std::string text = format_table(table, format);
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ParseError("cannot write " + out);
  f << text;
}

struct CommonFlags {
  std::string format = "csv";
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--format", format, "csv or json-like")
        ->check(CLI::IsMember({"csv", "json-like"}));
    app->add_option("--out", out, "output path (stdout when omitted)");
  }
};

int run(int argc, char** argv) {
  CLI::App app{"query-complexity measures, processes and experiments"};
  app.require_subcommand(1);

  // measure
  auto* measure = app.add_subcommand("measure", "complexity measures of a function");
  std::string fn_path, mu_path, eps_str = "1/3";
  uint64_t measure_seed = 0;
  int depth_cap = 0, state_cap = 0;
  CommonFlags measure_flags;
  measure->add_option("--function", fn_path, "function file")->required();
  measure->add_option("--mu", mu_path, "distribution file for the distributional row");
  measure->add_option("--epsilon", eps_str, "error bound as p/q");
  measure->add_option("--seed", measure_seed, "seed for the grid search");
  measure->add_option("--depth-cap", depth_cap, "memo cap override");
  measure->add_option("--state-cap", state_cap, "state cap override");
  measure_flags.attach(measure);

  // verify
  auto* verify = app.add_subcommand("verify", "run a property suite");
  std::string suite_name;
  uint64_t verify_seed = 1;
  size_t samples = 0;
  CommonFlags verify_flags;
  verify->add_option("suite", suite_name, "suite name, or 'all'")->required();
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--samples,--trials,--count", samples, "sample count override");
  verify_flags.attach(verify);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run or evaluate the query process");
  auto* process = simulate->add_subcommand("process", "query process on a tree and mixture");
  std::string tree_path, mixture_path, z_bits;
  bool exact = false, trace = false;
  std::optional<uint64_t> sim_seed;
  size_t sim_trials = 0, sim_state_cap = 1'000'000;
  CommonFlags sim_flags;
  process->add_option("--tree", tree_path, "tree file (nested text form)")->required();
  process->add_option("--mixture", mixture_path, "mixture file")->required();
  process->add_option("--z", z_bits, "hidden input bits")->required();
  process->add_flag("--exact", exact, "exact chart instead of sampling");
  process->add_flag("--trace", trace, "log one trajectory step by step");
  process->add_option("--trials", sim_trials, "Monte Carlo trajectories");
  process->add_option("--state-cap", sim_state_cap, "exact chart state cap");
  process->add_option("--seed", [&sim_seed](const std::vector<std::string>& v) {
    sim_seed = std::stoull(v.front());
    return true;
  }, "seed (required for sampling)");
  sim_flags.attach(process);

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark experiments");
  auto* f0g0 = bench->add_subcommand("f0g0", "majority-probe protocol");
  int bench_n = 1600, bench_trials = 200;
  std::string bench_eps = "1/3";
  std::optional<uint64_t> bench_seed;
  CommonFlags f0g0_flags;
  f0g0->add_option("--n", bench_n, "block size and count")->required();
  f0g0->add_option("--epsilon", bench_eps, "target error as p/q");
  f0g0->add_option("--trials", bench_trials, "trial count");
  f0g0->add_option("--seed", [&bench_seed](const std::vector<std::string>& v) {
    bench_seed = std::stoull(v.front());
    return true;
  }, "seed (required)");
  f0g0_flags.attach(f0g0);

  auto* catalog = bench->add_subcommand("measure-catalog", "measure table for the standard functions");
  uint64_t catalog_seed = 0;
  CommonFlags catalog_flags;
  catalog->add_option("--seed", catalog_seed, "seed for the grid search");
  catalog_flags.attach(catalog);

  auto* runspec = bench->add_subcommand("run", "run an experiment document");
  std::string spec_path;
  CommonFlags run_flags;
  runspec->add_option("--spec", spec_path, "experiment document")->required();
  run_flags.attach(runspec);

  CLI11_PARSE(app, argc, argv);

  if (*measure) {
    MeasureOptions opt;
    opt.epsilon = parse_rat(eps_str);
    opt.seed = measure_seed;
    if (depth_cap > 0) opt.budget.memo_cap = static_cast<size_t>(depth_cap);
    if (state_cap > 0) opt.budget.max_nodes = static_cast<size_t>(state_cap);
    PartialFunction g = function_from_json(load_json(fn_path));
    if (!mu_path.empty()) opt.mu = dist_from_json(load_json(mu_path));
    emit(measure_table(g, opt), measure_flags.format, measure_flags.out);
    return 0;
  }

  if (*verify) {
    auto registry = suite_registry();
    std::vector<SuiteResult> results;
    bool found = false;
    for (const auto& spec : registry) {
      if (suite_name != "all" && suite_name != spec.name) continue;
      found = true;
      size_t count = samples ? samples : spec.default_count;
      results.push_back(spec.run(verify_seed, count));
    }
    if (!found) {
      std::cerr << "unknown suite: " << suite_name << "\n";
      return 2;
    }
    Table t;
    t.header = {"suite", "checked", "failed", "status", "note"};
    bool any_failed = false;
    for (const auto& r : results) {
      t.rows.push_back({r.name, std::to_string(r.checked), std::to_string(r.failed),
                        r.pass() ? "pass" : "FAIL", r.note});
      any_failed |= !r.pass();
      for (const auto& ce : r.counterexamples)
        std::cerr << r.name << " counterexample: " << ce << "\n";
    }
    emit(t, verify_flags.format, verify_flags.out);
    return any_failed ? 1 : 0;
  }

  if (*process) {
    DecisionTree tree = [&] {
      std::ifstream in(tree_path);
      if (!in) throw ParseError("cannot open " + tree_path);
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      PairMixture q = mixture_from_json(load_json(mixture_path));
      check_bits(z_bits);
      int arity = static_cast<int>(z_bits.size()) * q.arity();
      return DecisionTree::parse_text(text, arity);
    }();
    PairMixture q = mixture_from_json(load_json(mixture_path));
    Table t;
    t.header = {"kind", "key", "value", "tag"};
    if (trace) {
      if (!sim_seed) {
        std::cerr << "trajectory traces need --seed\n";
        return 2;
      }
      Rng rng(*sim_seed);
      RunResult r = run_process(tree, q, z_bits, rng, std::nullopt, true);
      for (const auto& step : r.trace)
        t.rows.push_back({"step",
                          std::to_string(step.node) + "," + std::to_string(step.block) +
                              "," + (step.queried_flag ? "1" : "0") + "," +
                              std::to_string(step.branch),
                          "", "monte-carlo(sigma=0)"});
      t.rows.push_back({"leaf", std::to_string(r.leaf), "", "monte-carlo(sigma=0)"});
      emit(t, sim_flags.format, sim_flags.out);
      return 0;
    }
    if (exact) {
      ProcessChart chart = exact_process_chart(tree, q, z_bits, std::nullopt, sim_state_cap);
      for (const auto& [leaf, p] : chart.leaf_dist) {
        std::string key = std::to_string(leaf);
        if (tree.label(leaf)) key += ":" + *tree.label(leaf);
        t.rows.push_back({"leaf", key, rat_str(p), "exact"});
      }
      for (size_t i = 0; i < chart.expected_counts.size(); ++i)
        t.rows.push_back({"E[N]", std::to_string(i + 1),
                          rat_str(chart.expected_counts[i]), "exact"});
      for (size_t i = 0; i < chart.query_probs.size(); ++i)
        t.rows.push_back({"Pr[F]", std::to_string(i + 1),
                          rat_str(chart.query_probs[i]), "exact"});
    } else {
      if (!sim_seed) {
        std::cerr << "sampling runs need --seed\n";
        return 2;
      }
      if (sim_trials == 0) sim_trials = 10'000;
      std::map<int, size_t> counts;
      for (size_t k = 0; k < sim_trials; ++k) {
        Rng rng = Rng::substream(*sim_seed, k);
        counts[run_process(tree, q, z_bits, rng).leaf]++;
      }
      for (const auto& [leaf, c] : counts) {
        double rate = static_cast<double>(c) / static_cast<double>(sim_trials);
        double sigma = std::sqrt(std::max(rate * (1 - rate), 1e-12) /
                                 static_cast<double>(sim_trials));
        std::string key = std::to_string(leaf);
        if (tree.label(leaf)) key += ":" + *tree.label(leaf);
        t.rows.push_back({"leaf", key, mc_str(rate),
                          "monte-carlo(sigma=" + mc_str(sigma) + ")"});
      }
    }
    emit(t, sim_flags.format, sim_flags.out);
    return 0;
  }

  if (*f0g0) {
    if (!bench_seed) {
      std::cerr << "bench f0g0 needs --seed\n";
      return 2;
    }
    Json spec = {{"experiment", "f0g0"}, {"n", bench_n},
                 {"epsilon", bench_eps}, {"trials", bench_trials},
                 {"seed", *bench_seed}, {"threads", max_threads_from_env()}};
    emit(run_experiment(spec), f0g0_flags.format, f0g0_flags.out);
    return 0;
  }

  if (*catalog) {
    Json spec = {{"experiment", "measure-catalog"}, {"seed", catalog_seed}};
    emit(run_experiment(spec), catalog_flags.format, catalog_flags.out);
    return 0;
  }

  if (*runspec) {
    emit(run_experiment(load_json(spec_path)), run_flags.format, run_flags.out);
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qclab::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const qclab::DefectError& e) {
    std::cerr << "internal defect: " << e.what() << "\n";
    return 4;
  } catch (const qclab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
