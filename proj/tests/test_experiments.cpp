#include <catch2/catch_amalgamated.hpp>

#include "qclab/experiments.hpp"

using namespace qclab;

TEST_CASE("measure table for or2") {
  Table t = measure_table(make_or2());
  std::map<std::string, std::pair<std::string, std::string>> cells;
  for (const auto& row : t.rows) cells[row[0]] = {row[1], row[2]};
  CHECK(cells.at("D") == std::pair<std::string, std::string>{"2", "exact"});
  CHECK(cells.at("RS") == std::pair<std::string, std::string>{"3/2", "exact"});
  CHECK(cells.at("chibar_lb").first == "3/2");
  CHECK(cells.at("chibar_lb").second == "lower-bound");
  CHECK(parse_rat(cells.at("chi_lb").first) >= Rat(3, 2));
}

TEST_CASE("measure table with a distribution") {
  MeasureOptions opt;
  opt.mu = Dist::uniform(all_strings(2));
  Table t = measure_table(make_or2(), opt);
  bool found = false;
  for (const auto& row : t.rows)
    if (row[0] == "D_mu_eps") {
      found = true;
      CHECK(row[1] == "0");  // constant 1 errs with mass 1/4 <= 1/3
    }
  CHECK(found);
}

TEST_CASE("budget overruns surface as budget cells") {
  MeasureOptions opt;
  opt.budget.memo_cap = 2;
  opt.pair_cap = 1;
  Table t = measure_table(make_maj3(), opt);
  size_t budget_cells = 0;
  for (const auto& row : t.rows)
    if (row[2] == "budget") ++budget_cells;
  CHECK(budget_cells >= 2);
}

TEST_CASE("experiment registry") {
  CHECK_THROWS_AS(run_experiment(Json{{"experiment", "mystery"}}), ConfigError);
  CHECK_THROWS_AS(run_experiment(Json::object()), ConfigError);

  Table comp = run_experiment(Json{{"experiment", "composition"}});
  REQUIRE(comp.rows.size() == 4);
  for (const auto& row : comp.rows) {
    CHECK(row[1] == "1/1");                           // exact correctness
    CHECK(parse_rat(row[2]) <= parse_rat(row[3]));    // query bound holds
  }

  Table sim = run_experiment(Json{{"experiment", "simulation-check"},
                                  {"seed", 3},
                                  {"count", 10}});
  REQUIRE(sim.rows.size() == 1);
  CHECK(sim.rows[0][2] == "0");
}

TEST_CASE("suite registry names are unique and runnable") {
  auto reg = suite_registry();
  std::set<std::string> names;
  for (const auto& s : reg) names.insert(s.name);
  CHECK(names.size() == reg.size());
  CHECK(names.count("simulation"));
  CHECK(names.count("pinsker"));
  CHECK(names.count("determinism"));
}
