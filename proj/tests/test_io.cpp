#include <catch2/catch_amalgamated.hpp>

#include "qclab/bench.hpp"
#include "qclab/io.hpp"

using namespace qclab;

TEST_CASE("rational text form") {
  CHECK(rat_str(Rat(3, 2)) == "3/2");
  CHECK(rat_str(Rat(-2, 4)) == "-1/2");
  CHECK(rat_str(Rat(0)) == "0/1");
  CHECK(parse_rat("3/2") == Rat(3, 2));
  CHECK(parse_rat("7") == Rat(7));
  CHECK(parse_rat("-4/6") == Rat(-2, 3));
  CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rat("abc"), ParseError);
}

TEST_CASE("function documents round-trip") {
  PartialFunction g = make_maj3();
  Json j = function_to_json(g);
  PartialFunction back = function_from_json(j);
  CHECK(back.zeros() == g.zeros());
  CHECK(back.ones() == g.ones());

  Json named = {{"named", "g0"}, {"n", 1600}};
  PartialFunction big = function_from_json(named);
  CHECK(big.arity() == 1600);
  CHECK_FALSE(big.is_explicit());
  CHECK_THROWS_AS(big.zeros(), BudgetError);
  CHECK_THROWS_AS(big.materialize(), BudgetError);

  PartialFunction small = function_from_json(Json{{"named", "g0"}, {"n", 9}});
  CHECK(small.is_explicit());
  // weights 0..1 map to 0 (9/2 - 3 = 1.5), weights 8..9 map to 1
  CHECK(small.evaluate("100000000") == GValue::zero);
  CHECK(small.evaluate("111111110") == GValue::one);
  CHECK(small.evaluate("111000000") == GValue::invalid);

  CHECK_THROWS_AS(function_from_json(Json{{"named", "mystery"}, {"n", 4}}), ParseError);
  CHECK_THROWS_AS(function_from_json(Json{{"m", 2}}), ParseError);
}

TEST_CASE("relation documents") {
  Json j;
  j["n"] = 2;
  j["outputs"] = Json::array({"0", "1"});
  j["pairs"] = Json::array({Json::array({"00", "0"}), Json::array({"01", "1"}),
                            Json::array({"10", "1"}), Json::array({"11", "0"})});
  Relation r = relation_from_json(j);
  CHECK(r.contains("01", "1"));
  CHECK_FALSE(r.contains("01", "0"));

  Relation f0 = relation_from_json(Json{{"named", "f0"}, {"n", 16}});
  CHECK(f0.arity() == 16);

  Json bad;
  bad["n"] = 2;
  bad["outputs"] = Json::array({"0"});
  bad["pairs"] = Json::array({Json::array({"00", "0"})});
  CHECK_THROWS_AS(relation_from_json(bad), DomainError);  // not total
}

TEST_CASE("distribution and mixture documents round-trip") {
  Dist d(2, {{"00", Rat(1, 3)}, {"11", Rat(2, 3)}});
  CHECK(dist_from_json(dist_to_json(d)) == d);

  PairMixture q({{Rat(1, 2), DistPair(Dist::point("00"), Dist::point("11"))},
                 {Rat(1, 2), DistPair(Dist::point("00"),
                                      Dist::uniform(std::vector<std::string>{"01", "10"}))}});
  PairMixture back = mixture_from_json(mixture_to_json(q));
  CHECK(mixture_to_json(back) == mixture_to_json(q));

  CHECK_THROWS_AS(dist_from_json(Json{{"m", 1}, {"weights", {{"0", "1/2"}}}}), DomainError);
}

TEST_CASE("csv quoting follows the rfc") {
  Table t;
  t.header = {"a", "b"};
  t.rows.push_back({"plain", "with,comma"});
  t.rows.push_back({"with\"quote", "with\nnewline"});
  std::string csv = to_csv(t);
  CHECK(csv ==
        "a,b\n"
        "plain,\"with,comma\"\n"
        "\"with\"\"quote\",\"with\nnewline\"\n");
  CHECK_THROWS_AS(format_table(t, "yaml"), ConfigError);
  CHECK(format_table(t, "json-like").find("\"header\"") != std::string::npos);
}
