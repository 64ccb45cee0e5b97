#include <catch2/catch_amalgamated.hpp>

#include "qclab/bench.hpp"
#include "qclab/simproc.hpp"
#include "qclab/verify.hpp"

using namespace qclab;

namespace {

PairMixture bit_mixture() {
  return PairMixture::singleton(DistPair(Dist::point("0"), Dist::point("1")));
}

}  // namespace

TEST_CASE("bitsampler band behavior") {
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    auto s = bitsampler(Rat(1, 2), Rat(1, 2), [] { return 0; }, rng);
    CHECK_FALSE(s.queried);
  }
  for (int k = 0; k < 200; ++k) {
    auto s = bitsampler(Rat(1), Rat(0), [] { return 0; }, rng);
    CHECK(s.queried);
    CHECK(s.bit == 0);  // z = 0, p_z = 1 is the larger side
    auto u = bitsampler(Rat(1), Rat(0), [] { return 1; }, rng);
    CHECK(u.bit == 1);
  }
  int queried = 0;
  for (int k = 0; k < 20'000; ++k)
    queried += bitsampler(Rat(1, 4), Rat(3, 4), [] { return 0; }, rng).queried;
  CHECK(queried > 9'500);
  CHECK(queried < 10'500);
  CHECK_THROWS_AS(bitsampler(Rat(2), Rat(0), [] { return 0; }, rng), DomainError);
}

TEST_CASE("single-bit process follows the hidden bit") {
  DecisionTree b = DecisionTree::parse_text("(q 1 (leaf 0) (leaf 1))", 1);
  PairMixture q = bit_mixture();
  Rng rng(2);
  for (const std::string z : {"0", "1"}) {
    RunResult r = run_process(b, q, z, rng);
    CHECK(r.state.counts[0] == 1);
    CHECK(r.state.is_queried(1));
    CHECK(*b.label(r.leaf) == z);
  }
}

TEST_CASE("two blocks queried in sequence") {
  DecisionTree b = DecisionTree::parse_text(
      "(q 1 (q 2 (leaf 00) (leaf 01)) (q 2 (leaf 10) (leaf 11)))", 2);
  PairMixture q = bit_mixture();
  Rng rng(3);
  for (const std::string& z : all_strings(2)) {
    RunResult r = run_process(b, q, z, rng, std::nullopt, true);
    CHECK(r.state.is_queried(1));
    CHECK(r.state.is_queried(2));
    CHECK(*b.label(r.leaf) == z);
    CHECK(r.trace.size() == 2);
  }
}

TEST_CASE("count bookkeeping matches the trace") {
  Rng meta(14);
  for (int k = 0; k < 50; ++k) {
    int m = 1 + static_cast<int>(meta.below(2));
    int t = 1 + static_cast<int>(meta.below(2));
    auto [zeros, ones] = gen::random_disjoint_sides(m, meta);
    PairMixture q = gen::random_mixture(zeros, ones, meta);
    DecisionTree b = gen::random_tree(t * m, 5, meta);
    std::string z = gen::random_bits(t, meta);
    Rng rng = Rng::substream(15, static_cast<uint64_t>(k));
    RunResult r = run_process(b, q, z, rng, std::nullopt, true);
    // N_i counts the block-i steps up to and including the one that flips
    // the query bit, and nothing afterwards.
    for (int i = 1; i <= t; ++i) {
      int64_t expect = 0;
      bool flipped = false;
      for (const auto& step : r.trace) {
        if (step.block != i || flipped) continue;
        ++expect;
        if (step.queried_flag) flipped = true;
      }
      CHECK(r.state.counts[static_cast<size_t>(i - 1)] == expect);
      CHECK(r.state.is_queried(i) == flipped);
    }
  }
}

TEST_CASE("exact chart agrees with trajectory frequencies") {
  Rng meta(4);
  auto [zeros, ones] = gen::random_disjoint_sides(2, meta);
  PairMixture q = gen::random_mixture(zeros, ones, meta);
  DecisionTree b = gen::random_tree(4, 4, meta);
  ProcessChart chart = exact_process_chart(b, q, "01");
  constexpr int kTrials = 100'000;
  std::map<int, int> counts;
  for (int k = 0; k < kTrials; ++k) {
    Rng rng = Rng::substream(99, static_cast<uint64_t>(k));
    counts[run_process(b, q, "01", rng).leaf]++;
  }
  for (const auto& [leaf, p] : chart.leaf_dist) {
    double expect = rat_double(p);
    double got = counts[leaf] / double(kTrials);
    double sigma = std::sqrt(std::max(expect * (1 - expect), 1e-9) / kTrials);
    CHECK(std::abs(got - expect) <= 4 * sigma + 1e-9);
  }
}

TEST_CASE("sampled composed inputs have the right block marginals") {
  DistPair pair(Dist::point("00"),
                Dist::uniform(std::vector<std::string>{"01", "10"}));
  PairMixture q = PairMixture::singleton(pair);
  // deterministic when both sides are points
  PairMixture pq = PairMixture::singleton(DistPair(Dist::point("00"), Dist::point("11")));
  Rng rng(5);
  CHECK(sample_gamma("01", pq, rng) == "0011");

  constexpr int kDraws = 100'000;
  std::map<std::string, int> freq;
  for (int k = 0; k < kDraws; ++k) {
    Rng r = Rng::substream(6, static_cast<uint64_t>(k));
    freq[sample_gamma("1", q, r)]++;
  }
  for (const auto& [x, w] : pair.mu1.weights()) {
    double expect = rat_double(w);
    double got = freq[x] / double(kDraws);
    double sigma = std::sqrt(expect * (1 - expect) / kDraws);
    CHECK(std::abs(got - expect) <= 4 * sigma);
  }
}

TEST_CASE("composed algorithm runs the process and labels the leaf") {
  PartialFunction g = make_or2();
  Relation f = make_parity_relation(2);
  auto opt = optimal_depth(compose(f, g, 2));
  PairMixture q = PairMixture::singleton(
      DistPair(Dist::point("00"), Dist::uniform(std::vector<std::string>{"01", "10"})));
  RandomizedAlgorithm alg = build_process_algorithm(opt.tree, q);
  for (const std::string& z : all_strings(2)) {
    auto chart = exact_algorithm_chart(alg, z);
    std::string want = hamming_weight(z) % 2 ? "1" : "0";
    CHECK(chart.output_dist.at(want) == 1);
    Rat sum = 0;
    for (size_t i = 0; i < chart.query_probs.size(); ++i) sum += chart.query_probs[i];
    CHECK(chart.expected_queries == sum);
    Rng rng(7);
    std::string out = run_process_algorithm(alg, z, rng);
    CHECK(out == want);
  }

  DecisionTree unlabeled = DecisionTree::parse_text("(q 1 (leaf) (leaf 1))", 2);
  CHECK_THROWS_AS(build_process_algorithm(unlabeled, q), DefectError);
}

TEST_CASE("output correctness equals the sampled-input route") {
  // Pr[(z, T(z)) in f] computed from the process chart must match the same
  // probability computed by pushing the sampled-input distribution through
  // the labeled tree.
  PartialFunction g = make_or2();
  Relation f = make_parity_relation(2);
  auto opt = optimal_depth(compose(f, g, 2));
  PairMixture q({{Rat(1, 3), DistPair(Dist::point("00"), Dist::point("11"))},
                 {Rat(2, 3), DistPair(Dist::point("00"),
                                      Dist::uniform(std::vector<std::string>{"01", "10"}))}});
  RandomizedAlgorithm alg = build_process_algorithm(opt.tree, q);
  for (const std::string& z : all_strings(2)) {
    auto chart = exact_algorithm_chart(alg, z);
    Rat via_chart = 0;
    for (const auto& [s, p] : chart.output_dist)
      if (f.contains(z, s)) via_chart += p;
    auto push = gamma_pushforward(opt.tree, q, z);
    Rat via_push = 0;
    for (int leaf : opt.tree.leaves())
      if (push.count(leaf) && f.contains(z, *opt.tree.label(leaf)))
        via_push += push.at(leaf);
    CHECK(via_chart == via_push);
  }
}

TEST_CASE("appending per-block trees") {
  DecisionTree top = DecisionTree::parse_text("(q 1 (leaf a) (leaf b))", 4);
  // no attachments: unchanged
  CHECK(append_subtrees(top, {}, 2).to_text() == top.to_text());

  std::map<std::pair<int, int>, DecisionTree> attach;
  DecisionTree sub = DecisionTree::parse_text("(q 2 (leaf) (leaf))", 2);
  for (int leaf : top.leaves()) {
    attach.emplace(std::make_pair(leaf, 1), sub);
    attach.emplace(std::make_pair(leaf, 2), sub);
  }
  DecisionTree h = append_subtrees(top, attach, 2);
  // queries add up along every chain: 1 (top) + 1 + 1, so 4 vertices deep
  CHECK(h.max_depth() == 4);

  // appending a block-1 tree that reuses the already-queried coordinate fails
  std::map<std::pair<int, int>, DecisionTree> clash;
  DecisionTree sub1 = DecisionTree::parse_text("(q 1 (leaf) (leaf))", 2);
  for (int leaf : top.leaves()) clash.emplace(std::make_pair(leaf, 1), sub1);
  CHECK_THROWS_AS(append_subtrees(top, clash, 2), StructureError);

  // completing every block makes the pair full for the process
  Rng rng(8);
  auto [zeros, ones] = gen::random_disjoint_sides(2, rng);
  PairMixture q = gen::random_mixture(zeros, ones, rng);
  DecisionTree full = gen::random_full_tree(q.implied_function(), 2, rng, 2);
  for (const std::string& z : all_strings(2)) {
    auto chart = exact_process_chart(full, q, z);
    CHECK(chart.query_probs[0] == 1);
    CHECK(chart.query_probs[1] == 1);
  }
}

TEST_CASE("tree truncation") {
  PartialFunction g = make_or2();
  Dist mu(2, {{"00", Rat(1, 2)}, {"01", Rat(1, 4)}, {"11", Rat(1, 4)}});
  DecisionTree t = DecisionTree::parse_text("(q 1 (q 2 (leaf 0) (leaf 1)) (leaf 1))", 2);

  CHECK(truncate(t, 2, mu, g).to_text() == t.to_text());
  CHECK(truncate(t, 5, mu, g).to_text() == t.to_text());

  DecisionTree root_cut = truncate(t, 0, mu, g);
  CHECK(root_cut.to_text() == "(leaf 0)");  // mass 1/2 on or2 = 0 wins the tie

  DecisionTree one = truncate(t, 1, mu, g);
  // the left subcube keeps mass 3/4 with majority 0
  CHECK(one.to_text() == "(q 1 (leaf 0) (leaf 1))");

  Dist invalid_mu(4, {{"0110", Rat(1)}});
  CHECK_THROWS_AS(truncate(DecisionTree::single_leaf(4, std::string("0")), 1,
                           invalid_mu, make_g0(4)),
                  DomainError);
}

TEST_CASE("chart of a query-free tree") {
  DecisionTree leaf = DecisionTree::single_leaf(2, std::string("x"));
  PairMixture q = bit_mixture();
  auto chart = exact_process_chart(leaf, q, "11");
  CHECK(chart.leaf_dist.at(leaf.root()) == 1);
  CHECK(chart.expected_counts[0] == 0);
  CHECK(chart.query_probs[1] == 0);
}

TEST_CASE("budgeted chart agrees with budgeted trajectories") {
  Rng meta(16);
  auto [zeros, ones] = gen::random_disjoint_sides(2, meta);
  PairMixture q = gen::random_mixture(zeros, ones, meta);
  DecisionTree full = gen::random_full_tree(q.implied_function(), 2, meta, 2);
  auto chart = exact_process_chart(full, q, "10", int64_t{1});
  constexpr int kTrials = 30'000;
  int stopped = 0;
  std::vector<int64_t> count_sum(2, 0);
  for (int k = 0; k < kTrials; ++k) {
    Rng rng = Rng::substream(17, static_cast<uint64_t>(k));
    RunResult r = run_process(full, q, "10", rng, int64_t{1});
    stopped += r.stopped;
    for (int i = 0; i < 2; ++i) count_sum[static_cast<size_t>(i)] += r.state.counts[static_cast<size_t>(i)];
  }
  double expect = rat_double(chart.stop_prob);
  double got = stopped / double(kTrials);
  double sigma = std::sqrt(std::max(expect * (1 - expect), 1e-9) / kTrials);
  CHECK(std::abs(got - expect) <= 4 * sigma + 1e-9);
  for (int i = 0; i < 2; ++i) {
    double mean = count_sum[static_cast<size_t>(i)] / double(kTrials);
    CHECK(std::abs(mean - rat_double(chart.expected_counts[static_cast<size_t>(i)])) < 0.1);
  }
}

TEST_CASE("runtime truncation stops at the budget") {
  DecisionTree b = DecisionTree::parse_text(
      "(q 1 (q 2 (leaf 00) (leaf 01)) (q 2 (leaf 10) (leaf 11)))", 2);
  PairMixture q = bit_mixture();
  RandomizedAlgorithm alg = build_process_algorithm(b, q);

  auto base = exact_algorithm_chart(alg, "01");
  CHECK(base.stop_prob == 0);
  CHECK(base.expected_queries == 2);

  RandomizedAlgorithm cut0 = truncate_runtime(alg, 0, "stop");
  auto c0 = exact_algorithm_chart(cut0, "01");
  CHECK(c0.stop_prob == 1);
  CHECK(c0.output_dist.at("stop") == 1);
  Rng rng(9);
  CHECK(run_process_algorithm(cut0, "01", rng) == "stop");

  RandomizedAlgorithm cut1 = truncate_runtime(alg, 1, "stop");
  auto c1 = exact_algorithm_chart(cut1, "01");
  CHECK(c1.stop_prob == 1);  // this instance always needs both bits

  RandomizedAlgorithm wide = truncate_runtime(alg, 100, "stop");
  auto cw = exact_algorithm_chart(wide, "01");
  CHECK(cw.stop_prob == 0);
  CHECK(cw.output_dist == base.output_dist);

  // Markov bound on random full instances: Pr[stop] <= E[queries] / budget
  Rng meta(10);
  for (int k = 0; k < 10; ++k) {
    auto [zeros, ones] = gen::random_disjoint_sides(2, meta);
    PairMixture mix = gen::random_mixture(zeros, ones, meta);
    DecisionTree full = gen::random_full_tree(mix.implied_function(), 2, meta, 2);
    DecisionTree labeled = full;
    for (int leaf : labeled.leaves()) labeled.set_label(leaf, std::string("x"));
    RandomizedAlgorithm a = build_process_algorithm(labeled, mix);
    auto whole = exact_algorithm_chart(a, "01");
    for (int64_t budget : {1, 2, 3}) {
      auto c = exact_algorithm_chart(truncate_runtime(a, budget, "f"), "01");
      CHECK(c.stop_prob <= whole.expected_queries / Rat(budget));
    }
  }
}
