#include <catch2/catch_amalgamated.hpp>

#include "qclab/bench.hpp"
#include "qclab/dtree.hpp"
#include "qclab/rng.hpp"
#include "qclab/verify.hpp"

using namespace qclab;

namespace {

DecisionTree x1_then_x2() {
  // (q 1 (q 2 (leaf 0) (leaf 1)) (leaf 1)) computes or2
  return DecisionTree::parse_text("(q 1 (q 2 (leaf 0) (leaf 1)) (leaf 1))", 2);
}

}  // namespace

TEST_CASE("tree evaluation walks to the right leaf") {
  DecisionTree t = x1_then_x2();
  CHECK(*t.eval("01").label == "1");
  CHECK(*t.eval("00").label == "0");
  CHECK(*t.eval("10").label == "1");

  DecisionTree leaf = DecisionTree::single_leaf(2, std::string("0"));
  CHECK(leaf.eval("11").leaf == leaf.root());
}

TEST_CASE("tree text round-trips") {
  for (const std::string& text :
       {std::string("(leaf)"), std::string("(leaf 01)"),
        std::string("(q 1 (q 2 (leaf 0) (leaf 1)) (leaf 1))"),
        std::string("(q 3 (leaf) (q 1 (leaf a) (leaf b)))")}) {
    DecisionTree t = DecisionTree::parse_text(text, 3);
    CHECK(t.to_text() == text);
  }
  CHECK_THROWS_AS(DecisionTree::parse_text("(q 1 (leaf))", 2), ParseError);
  CHECK_THROWS_AS(DecisionTree::parse_text("(q 1 (q 1 (leaf) (leaf)) (leaf))", 2),
                  StructureError);
  CHECK_THROWS_AS(DecisionTree::parse_text("(q 7 (leaf) (leaf))", 2), ArityError);
}

TEST_CASE("validate_computes checks every valid input") {
  PartialFunction or2 = make_or2();
  CHECK(validate_computes(x1_then_x2(), or2).computes);

  DecisionTree const0 = DecisionTree::single_leaf(2, std::string("0"));
  auto r = validate_computes(const0, or2);
  CHECK_FALSE(r.computes);
  CHECK(or2.evaluate(r.witness) == GValue::one);

  // the promise makes one bit decisive
  PartialFunction g0 = make_g0(4);
  DecisionTree one_bit = DecisionTree::parse_text("(q 1 (leaf 0) (leaf 1))", 4);
  CHECK(validate_computes(one_bit, g0).computes);

  DecisionTree full_xor = DecisionTree::parse_text(
      "(q 1 (q 2 (leaf 0) (leaf 1)) (q 2 (leaf 1) (leaf 0)))", 2);
  CHECK(validate_computes(full_xor, make_xor2()).computes);
}

TEST_CASE("separation depth") {
  DecisionTree t = x1_then_x2();
  CHECK(sep(t, "00", "10") == 1);
  CHECK(sep(t, "00", "01") == 2);
  CHECK_THROWS_AS(sep(t, "01", "01"), PairError);
  DecisionTree leaf = DecisionTree::single_leaf(2, std::string("1"));
  CHECK_THROWS_AS(sep(leaf, "00", "01"), SeparationError);
}

TEST_CASE("optimal depth on the standard functions") {
  CHECK(optimal_depth(make_or2()).depth == 2);
  CHECK(optimal_depth(make_xor2()).depth == 2);
  CHECK(optimal_depth(make_g0(4)).depth == 1);
  CHECK(optimal_depth(make_maj3()).depth == 3);

  auto r = optimal_depth(make_or2());
  CHECK(validate_computes(r.tree, make_or2()).computes);
}

TEST_CASE("distributional optimum on or2 under uniform") {
  Dist mu = Dist::uniform(all_strings(2));
  Problem h = Problem::of(make_or2());
  CHECK(distributional_opt(h, mu, 0).error == Rat(1, 4));
  CHECK(distributional_opt(h, mu, 1).error == Rat(1, 4));
  CHECK(distributional_opt(h, mu, 2).error == 0);
  CHECK(distributional_complexity(h, mu, Rat(1, 4)) == 0);
  CHECK(distributional_complexity(h, mu, Rat(1, 5)) == 2);
}

TEST_CASE("min_sep_tree matches hand values") {
  PartialFunction or2 = make_or2();
  PairDist p;
  p[{"00", "11"}] = 1;
  CHECK(min_sep_tree(or2, p).value == 1);

  PairDist q;
  q[{"00", "01"}] = Rat(1, 2);
  q[{"00", "10"}] = Rat(1, 2);
  auto r = min_sep_tree(or2, q);
  CHECK(r.value == Rat(3, 2));
  CHECK(validate_computes(r.tree, or2).computes);

  PairDist single;
  single[{"00", "01"}] = 1;
  CHECK(min_sep_tree(or2, single).value == 1);

  PairDist bad;
  bad[{"01", "01"}] = 1;
  CHECK_THROWS_AS(min_sep_tree(or2, bad), PairError);
  PairDist wrong;
  wrong[{"11", "01"}] = 1;
  CHECK_THROWS_AS(min_sep_tree(or2, wrong), PairError);
}

TEST_CASE("min_chi_tree matches hand values") {
  PartialFunction or2 = make_or2();
  DistPair pt(Dist::point("00"), Dist::point("11"));
  CHECK(min_chi_tree(pt).value == 1);

  DistPair mixed(Dist::point("00"),
                 Dist::uniform(std::vector<std::string>{"01", "10"}));
  auto r = min_chi_tree(mixed, {}, &or2);
  CHECK(r.value == Rat(3, 2));
  CHECK(validate_computes(r.tree, or2).computes);

  // on point pairs the walk cost is the separation depth
  Rng rng(7);
  for (int k = 0; k < 30; ++k) {
    PartialFunction g = gen::random_partial_function(2, rng);
    for (const auto& x : g.zeros())
      for (const auto& y : g.ones()) {
        DistPair pair(Dist::point(x), Dist::point(y));
        auto opt = min_chi_tree(pair, {}, &g);
        CHECK(opt.value == Rat(sep(opt.tree, x, y)));
      }
  }
}

TEST_CASE("tree enumeration counts and structure") {
  CHECK(enumerate_trees(1, 1).size() == 2);
  CHECK(enumerate_trees(2, 1).size() == 3);
  CHECK(enumerate_trees(2, 2).size() == count_trees(2, 2));
  CHECK(enumerate_trees(3, 3).size() == count_trees(3, 3));
  CHECK(count_trees(2, 2) == 9);
  CHECK(count_trees(3, 3) == 244);

  // every generated tree is distinct and never repeats a query on a path
  auto trees = enumerate_trees(3, 3);
  std::set<std::string> keys;
  for (const auto& t : trees) keys.insert(t.to_text());
  CHECK(keys.size() == trees.size());

  TreeSearchBudget tight;
  tight.max_nodes = 10;
  CHECK_THROWS_AS(enumerate_trees(3, 3, tight), BudgetError);
}

TEST_CASE("dp instance caps are enforced") {
  TreeSearchBudget tiny;
  tiny.memo_cap = 2;
  CHECK_THROWS_AS(optimal_depth(make_maj3(), tiny), BudgetError);
}
