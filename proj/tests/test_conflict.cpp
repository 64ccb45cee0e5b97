#include <catch2/catch_amalgamated.hpp>

#include "qclab/bench.hpp"
#include "qclab/conflict.hpp"
#include "qclab/verify.hpp"

using namespace qclab;

namespace {

DecisionTree or2_tree() {
  return DecisionTree::parse_text("(q 1 (q 2 (leaf 0) (leaf 1)) (leaf 1))", 2);
}

DistPair or2_pair() {
  return DistPair(Dist::point("00"),
                  Dist::uniform(std::vector<std::string>{"01", "10"}));
}

}  // namespace

TEST_CASE("walk chart matches the hand evaluation") {
  WalkChart c = walk_chart(or2_tree(), or2_pair());
  REQUIRE(c.nodes.size() == 2);
  CHECK(c.nodes[0].delta == Rat(1, 2));
  CHECK(c.nodes[1].weight == Rat(1, 2));
  CHECK(c.nodes[1].delta == 1);
  CHECK(c.total == Rat(3, 2));
  CHECK(c.mass == 1);
}

TEST_CASE("point pairs reduce the walk to separation depth") {
  PartialFunction or2 = make_or2();
  DecisionTree t = or2_tree();
  for (const auto& x : or2.zeros())
    for (const auto& y : or2.ones()) {
      DistPair pair(Dist::point(x), Dist::point(y));
      WalkChart c = walk_chart(t, pair);
      CHECK(c.total == Rat(sep(t, x, y)));
      CHECK(c.mass == 1);
    }
}

TEST_CASE("fullness") {
  CHECK(is_full(or2_tree(), or2_pair()));
  DecisionTree leaf = DecisionTree::single_leaf(2, std::string("1"));
  CHECK_FALSE(is_full(leaf, or2_pair()));

  // a mixture is full only when every pair is
  DecisionTree partial = DecisionTree::parse_text("(q 1 (leaf 0) (leaf 1))", 2);
  DistPair separated(Dist::point("00"), Dist::point("10"));
  DistPair stuck(Dist::point("00"), Dist::point("01"));
  CHECK(is_full(partial, separated));
  CHECK_FALSE(is_full(partial, stuck));
  PairMixture both({{Rat(1, 2), separated}, {Rat(1, 2), stuck}});
  CHECK_FALSE(is_full(partial, both));
  CHECK_THROWS_AS(chi_mixture(partial, both), FullnessError);
}

TEST_CASE("mixture walk cost is the weighted average") {
  DecisionTree t = or2_tree();
  PairMixture single = PairMixture::singleton(or2_pair());
  CHECK(chi_mixture(t, single) == walk_chart(t, or2_pair()).total);

  DistPair a(Dist::point("00"), Dist::point("01"));
  DistPair b(Dist::point("00"), Dist::point("10"));
  PairMixture two({{Rat(1, 2), a}, {Rat(1, 2), b}});
  CHECK(chi_mixture(t, two) == Rat(3, 2));  // (2 + 1) / 2
}

TEST_CASE("min over trees of the mixture walk cost") {
  PartialFunction or2 = make_or2();
  PairMixture single = PairMixture::singleton(or2_pair());
  auto r = min_chi_mixture(or2, single);
  CHECK(r.value == min_chi_tree(or2_pair(), {}, &or2).value);
  CHECK(r.certified);
  CHECK(chi_mixture(r.tree, single) == r.value);

  // singleton pairs recover the separation game value
  DistPair a(Dist::point("00"), Dist::point("01"));
  DistPair b(Dist::point("00"), Dist::point("10"));
  PairMixture two({{Rat(1, 2), a}, {Rat(1, 2), b}});
  PairDist p;
  p[{"00", "01"}] = Rat(1, 2);
  p[{"00", "10"}] = Rat(1, 2);
  CHECK(min_chi_mixture(or2, two).value == min_sep_tree(or2, p).value);
  CHECK(min_chi_mixture(or2, two).value == Rat(3, 2));

  DistPair inconsistent(Dist::point("01"), Dist::point("11"));
  CHECK_THROWS_AS(min_chi_mixture(or2, PairMixture::singleton(inconsistent)),
                  ConsistencyError);

  // budget overruns degrade to a non-certified upper bound
  TreeSearchBudget tiny;
  tiny.memo_cap = 1;
  auto capped = min_chi_mixture(or2, two, tiny);
  CHECK_FALSE(capped.certified);
  CHECK(capped.value >= min_chi_mixture(or2, two).value);
  CHECK(chi_mixture(capped.tree, two) == capped.value);
}

TEST_CASE("mixture minimization matches exhaustive enumeration") {
  Rng meta(23);
  for (int k = 0; k < 25; ++k) {
    int m = 1 + static_cast<int>(meta.below(3));
    auto [zeros, ones] = gen::random_disjoint_sides(m, meta);
    PairMixture q = gen::random_mixture(zeros, ones, meta);
    PartialFunction g = q.implied_function();
    Rat best;
    bool first = true;
    for (const auto& s : enumerate_trees(m, m)) {
      auto labeled = try_label_for(s, g);
      if (!labeled) continue;
      Rat v = chi_mixture(*labeled, q);
      if (first || v < best) best = v, first = false;
    }
    REQUIRE_FALSE(first);
    auto opt = min_chi_mixture(g, q);
    CHECK(opt.value == best);
    CHECK(chi_mixture(opt.tree, q) == best);
  }
}

TEST_CASE("sabotage double oracle matches the full matrix on random functions") {
  Rng meta(29);
  for (int k = 0; k < 5; ++k) {
    PartialFunction g = gen::random_partial_function(3, meta);
    std::vector<DecisionTree> trees;
    for (const auto& s : enumerate_trees(3, 3))
      if (auto labeled = try_label_for(s, g)) trees.push_back(*labeled);
    MatrixGame mg;
    for (const auto& [x, y] : cross_pairs(g, 4096)) {
      std::vector<Rat> row;
      for (const auto& t : trees) row.emplace_back(sep(t, x, y));
      mg.payoffs.push_back(std::move(row));
    }
    CHECK(sabotage(g).value == solve_matrix(mg).value);
  }
}

TEST_CASE("sabotage game values") {
  CHECK(sabotage(make_g0(4)).value == 1);
  CHECK(sabotage(make_or2()).value == Rat(3, 2));
  CHECK(sabotage(make_xor2()).value == Rat(3, 2));

  auto r = sabotage(make_or2());
  REQUIRE(r.certified);
  Rat mass = 0;
  for (const auto& [pr, w] : r.pair_dist) mass += w;
  CHECK(mass == 1);

  TreeSearchBudget b;
  CHECK_THROWS_AS(sabotage(make_maj3(), b, 2), BudgetError);
}

TEST_CASE("restricted mixture games bound the conflict measure") {
  PartialFunction or2 = make_or2();
  auto singles = chibar_lower_bound(or2, singleton_candidates(or2));
  CHECK(singles.value == sabotage(or2).value);

  std::vector<DistPair> one = {or2_pair()};
  CHECK(chibar_lower_bound(or2, one).value == min_chi_tree(or2_pair()).value);

  auto wider = singleton_candidates(or2);
  wider.push_back(or2_pair());
  auto improved = chibar_lower_bound(or2, wider);
  CHECK(improved.value >= Rat(3, 2));
  CHECK(improved.value >= singles.value);

  std::vector<DistPair> clash = {DistPair(Dist::point("00"), Dist::point("01")),
                                 DistPair(Dist::point("01"), Dist::point("11"))};
  CHECK_THROWS_AS(chibar_lower_bound(or2, clash), ConsistencyError);
}

TEST_CASE("grid search lower bounds") {
  auto g0 = make_g0(4);
  auto r = chi_search(g0, 4, 16, 3);
  CHECK(r.value == 1);
  REQUIRE(r.mu0.size() == 1);
  CHECK(r.mu0[0].first == "0000");
  CHECK(r.mu1[0].first == "1111");

  CHECK(chi_search(make_or2(), 8, 16, 3).value >= Rat(3, 2));

  Rng rng(5);
  PartialFunction g = gen::random_partial_function(3, rng);
  CHECK(chi_search(g, 2, 4, 3).value >= 1);
}
