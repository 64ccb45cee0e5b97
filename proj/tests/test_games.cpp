#include <catch2/catch_amalgamated.hpp>

#include "qclab/bench.hpp"
#include "qclab/games.hpp"
#include "qclab/rng.hpp"
#include "qclab/verify.hpp"

using namespace qclab;

namespace {

MatrixGame game(std::vector<std::vector<int>> rows) {
  MatrixGame g;
  for (auto& r : rows) {
    std::vector<Rat> row(r.begin(), r.end());
    g.payoffs.push_back(std::move(row));
  }
  return g;
}

MatrixGame random_game(Rng& rng, size_t rows, size_t cols) {
  MatrixGame g;
  for (size_t i = 0; i < rows; ++i) {
    std::vector<Rat> row;
    for (size_t j = 0; j < cols; ++j)
      row.emplace_back(static_cast<int>(rng.below(17)) - 8,
                       1 + static_cast<int>(rng.below(4)));
    g.payoffs.push_back(std::move(row));
  }
  return g;
}

}  // namespace

TEST_CASE("matrix games with known values") {
  auto s = solve_matrix(game({{2, 1}, {1, 2}}));
  CHECK(s.value == Rat(3, 2));
  CHECK(s.row_mix == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});
  CHECK(s.col_mix == std::vector<Rat>{Rat(1, 2), Rat(1, 2)});

  CHECK(solve_matrix(game({{7}})).value == 7);
  CHECK(solve_matrix(game({{1, 0}, {0, 0}})).value == 0);
  CHECK(solve_matrix(game({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}})).value == 0);
}

TEST_CASE("value is invariant under permutation and dominated strategies") {
  Rng rng(11);
  for (int k = 0; k < 40; ++k) {
    size_t rows = 1 + rng.below(5), cols = 1 + rng.below(5);
    MatrixGame g = random_game(rng, rows, cols);
    Rat v = solve_matrix(g).value;

    MatrixGame swapped = g;
    if (rows > 1) std::swap(swapped.payoffs[0], swapped.payoffs[1]);
    if (cols > 1)
      for (auto& row : swapped.payoffs) std::swap(row[0], row[1]);
    CHECK(solve_matrix(swapped).value == v);

    // a row dominated by row 0 cannot raise the value
    MatrixGame extended = g;
    std::vector<Rat> dominated = g.payoffs[0];
    for (auto& x : dominated) x -= 1;
    extended.payoffs.push_back(std::move(dominated));
    CHECK(solve_matrix(extended).value == v);
  }
}

TEST_CASE("double oracle with exhaustive universes equals the full solve") {
  Rng rng(13);
  for (int k = 0; k < 25; ++k) {
    size_t rows = 1 + rng.below(7), cols = 1 + rng.below(7);
    MatrixGame g = random_game(rng, rows, cols);
    Rat direct = solve_matrix(g).value;

    OracleGame<size_t, size_t> og;
    og.payoff = [&](size_t i, size_t j) { return g.payoffs[i][j]; };
    og.row_key = [](size_t i) { return std::to_string(i); };
    og.col_key = [](size_t j) { return std::to_string(j); };
    og.row_oracle = [&](const std::vector<std::pair<size_t, Rat>>& cmix) {
      BestResponse<size_t> best;
      bool first = true;
      for (size_t i = 0; i < g.rows(); ++i) {
        Rat v = 0;
        for (const auto& [j, w] : cmix) v += w * g.payoffs[i][og.cols[j]];
        if (first || v > best.value) best = {i, v}, first = false;
      }
      return best;
    };
    og.col_oracle = [&](const std::vector<std::pair<size_t, Rat>>& rmix) {
      BestResponse<size_t> best;
      bool first = true;
      for (size_t j = 0; j < g.cols(); ++j) {
        Rat v = 0;
        for (const auto& [i, w] : rmix) v += w * g.payoffs[og.rows[i]][j];
        if (first || v < best.value) best = {j, v}, first = false;
      }
      return best;
    };
    og.rows.push_back(0);
    og.cols.push_back(0);
    auto res = double_oracle(og);
    REQUIRE(res.certified);
    CHECK(res.lo == direct);
    CHECK(res.hi == direct);

    // a one-round cap still returns a valid bracket
    OracleGame<size_t, size_t> capped = og;
    capped.rows = {0};
    capped.cols = {0};
    auto partial = double_oracle(capped, Rat(0), 1);
    CHECK(partial.lo <= direct);
    CHECK(partial.hi >= direct);
  }
}

TEST_CASE("randomized complexity via the error game") {
  CHECK(randomized_complexity(Problem::of(make_xor2()), Rat(1, 3)).value == 2);
  CHECK(randomized_complexity(Problem::of(make_g0(4)), Rat(1, 3)).value == 1);
  // mixing the three single-query trees errs exactly 1/3 on every input
  CHECK(randomized_complexity(Problem::of(make_maj3()), Rat(1, 3)).value == 1);
  CHECK(error_game_value(Problem::of(make_maj3()), 1).value == Rat(1, 3));
  // the uniform middle-layer distribution forces error 1/3 at depth 2 as well
  CHECK(error_game_value(Problem::of(make_maj3()), 2).value == Rat(1, 3));
  CHECK(randomized_complexity(Problem::of(make_maj3()), Rat(1, 4)).value == 3);

  // level values decrease with the depth budget
  Problem h = Problem::of(make_maj3());
  Rat prev = 1;
  for (int l = 0; l <= 3; ++l) {
    Rat v = error_game_value(h, l).value;
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(prev == 0);

  CHECK_THROWS_AS(randomized_complexity(Problem::of(make_or2()), Rat(1, 2)),
                  DomainError);
}

TEST_CASE("error game value matches the fully enumerated matrix") {
  // Independent route: every depth-bounded structure with every leaf
  // labeling, solved as one exact matrix game.
  Rng meta(31);
  std::vector<PartialFunction> gs = {make_or2(), make_xor2(), make_and2(),
                                     gen::random_partial_function(2, meta)};
  for (const auto& g : gs) {
    Problem h = Problem::of(g);
    for (int l = 0; l <= 2; ++l) {
      std::vector<DecisionTree> cols;
      for (const auto& s : enumerate_trees(2, l)) {
        auto leaves = s.leaves();
        size_t combos = size_t{1} << leaves.size();
        for (size_t mask = 0; mask < combos; ++mask) {
          DecisionTree labeled = s;
          for (size_t i = 0; i < leaves.size(); ++i)
            labeled.set_label(leaves[i], std::string(mask >> i & 1 ? "1" : "0"));
          cols.push_back(std::move(labeled));
        }
      }
      MatrixGame mg;
      for (const auto& z : all_strings(2)) {
        std::vector<Rat> row;
        for (const auto& t : cols)
          row.push_back(h.contains(z, *t.eval(z).label) ? Rat(0) : Rat(1));
        mg.payoffs.push_back(std::move(row));
      }
      CHECK(error_game_value(h, l).value == solve_matrix(mg).value);
    }
  }
}
