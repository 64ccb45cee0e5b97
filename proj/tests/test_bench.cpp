#include <catch2/catch_amalgamated.hpp>

#include "qclab/bench.hpp"
#include "qclab/rng.hpp"

using namespace qclab;

TEST_CASE("threshold pair at n = 4 matches direct transcription") {
  PartialFunction g0 = make_g0(4);
  CHECK(g0.zeros() == std::set<std::string>{"0000"});
  CHECK(g0.ones() == std::set<std::string>{"1111"});

  Relation f0 = make_f0(4);
  for (const auto& z : all_strings(4))
    for (const auto& a : all_strings(4)) {
      int dist = 0;
      for (int i = 1; i <= 4; ++i) dist += bit_at(z, i) != bit_at(a, i);
      bool direct = dist == 0;  // threshold n/2 - sqrt(n) = 0
      CHECK(f0.contains(z, a) == direct);
    }

  CHECK_THROWS_AS(make_f0(0), ArityError);
  CHECK_THROWS_AS(make_f0(2), InfeasibleError);
  CHECK_THROWS_AS(make_g0(0), ArityError);
}

TEST_CASE("weight thresholds are exact at n = 16") {
  PartialFunction g0 = make_g0(16);
  std::string w3 = "1110000000000000";
  std::string w4 = "1111000000000000";
  std::string w12 = "1111111111110000";
  CHECK(g0.evaluate(w3) == GValue::zero);   // 3 <= 8 - 4
  CHECK(g0.evaluate(w4) == GValue::zero);   // boundary 4 = 8 - 4
  CHECK(g0.evaluate(w12) == GValue::one);   // boundary 12 = 8 + 4
  CHECK(g0.evaluate("1111100000000000") == GValue::invalid);  // weight 5
}

TEST_CASE("probe count selection") {
  CHECK(choose_t(Rat(1, 3), 1600) == 21);
  CHECK(choose_t(Rat(1, 3), 441) == 21);
  CHECK_THROWS_AS(choose_t(Rat(1, 3), 400), InfeasibleError);
  try {
    choose_t(Rat(1, 3), 400);
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("441") != std::string::npos);
  }
  CHECK(choose_t(Rat(1, 100), 10'000) < choose_t(Rat(1, 1'000'000), 10'000));
  CHECK_THROWS_AS(choose_t(Rat(0), 100), DomainError);
}

TEST_CASE("majority probing") {
  Rng rng(1);
  std::vector<std::string> blocks = {"1111", "0000", "1111"};
  ProbeResult r = majority_probe(blocks, 3, rng);
  CHECK(r.answer == "101");
  CHECK(r.probes == 9);
  CHECK_THROWS_AS(majority_probe(blocks, 2, rng), DomainError);
}

TEST_CASE("per-block success probability beats the advantage bound") {
  // the binding block weights at n = 1600, t = 21
  Rat low = majority_success_prob(1600, 760, 21);
  Rat high = majority_success_prob(1600, 840, 21);
  Rat bound = Rat(1, 2) + Rat(21, 320);
  CHECK(low > bound);
  CHECK(high > bound);
  CHECK(low == high);  // symmetric block weights
}

TEST_CASE("protocol monte carlo at a reduced size") {
  F0G0Report rep = run_f0g0(484, Rat(1, 3), 40, 5);
  CHECK(rep.t == 21);
  CHECK(rep.trials == 40);
  CHECK(rep.queries_per_trial == 21 * 484);
  CHECK(rep.failure_rate <= 1.0 / 3);

  CHECK_THROWS_AS(run_f0g0(400, Rat(1, 3), 10, 5), InfeasibleError);
}

TEST_CASE("catalog relations are total") {
  CHECK(make_parity_relation(3).contains("101", "0"));
  CHECK(make_identity_relation(2).contains("10", "10"));
  CHECK_FALSE(make_identity_relation(2).contains("10", "01"));
  CHECK_THROWS_AS(Relation(1, {"0", "1"}, {{"0", "0"}}), DomainError);  // 1 has no output
}
