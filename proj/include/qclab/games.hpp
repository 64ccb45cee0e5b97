#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "qclab/dtree.hpp"

namespace qclab {

// ---------------------------------------------------------------------------
// Exact zero-sum matrix games

struct MatrixGame {
  // payoffs[i][j]: maximizer plays row i, minimizer plays column j
  std::vector<std::vector<Rat>> payoffs;
  std::vector<std::string> row_labels;  // optional
  std::vector<std::string> col_labels;

  size_t rows() const { return payoffs.size(); }
  size_t cols() const { return payoffs.empty() ? 0 : payoffs.front().size(); }
};

struct MatrixSolution {
  Rat value;
  std::vector<Rat> row_mix;
  std::vector<Rat> col_mix;
};

namespace detail {

// Primal simplex with Bland's rule on: maximize sum(w) s.t. B w <= 1, w >= 0,
// where B is the payoff matrix shifted entrywise positive.  The optimum W
// gives game value 1/W (of B); the dual prices under the slack columns give
// the row player's optimal mix.
struct ShiftedLp {
  Rat objective;            // W
  std::vector<Rat> w;       // size C
  std::vector<Rat> duals;   // size R
};

inline ShiftedLp solve_shifted(const std::vector<std::vector<Rat>>& b) {
  const size_t rows = b.size();
  const size_t cols = b.front().size();
  const size_t width = cols + rows + 1;  // variables, slacks, rhs
  std::vector<std::vector<Rat>> t(rows, std::vector<Rat>(width, Rat(0)));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) t[i][j] = b[i][j];
    t[i][cols + i] = 1;
    t[i][width - 1] = 1;
  }
  std::vector<Rat> reduced(width - 1, Rat(0));
  for (size_t j = 0; j < cols; ++j) reduced[j] = 1;
  std::vector<size_t> basis(rows);
  for (size_t i = 0; i < rows; ++i) basis[i] = cols + i;

  for (;;) {
    size_t enter = width - 1;
    for (size_t j = 0; j < width - 1; ++j)
      if (reduced[j] > 0) {
        enter = j;
        break;  // Bland: smallest index
      }
    if (enter == width - 1) break;

    size_t leave = rows;
    Rat best_ratio;
    for (size_t i = 0; i < rows; ++i) {
      if (t[i][enter] <= 0) continue;
      Rat ratio = t[i][width - 1] / t[i][enter];
      if (leave == rows || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == rows) throw DefectError("shifted game LP unbounded");

    Rat piv = t[leave][enter];
    for (auto& x : t[leave]) x /= piv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rat f = t[i][enter];
      for (size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    Rat f = reduced[enter];
    if (f != 0)
      for (size_t j = 0; j < width - 1; ++j) reduced[j] -= f * t[leave][j];
    basis[leave] = enter;
  }

  ShiftedLp out;
  out.w.assign(cols, Rat(0));
  for (size_t i = 0; i < rows; ++i)
    if (basis[i] < cols) out.w[basis[i]] = t[i][width - 1];
  out.objective = 0;
  for (const Rat& x : out.w) out.objective += x;
  out.duals.assign(rows, Rat(0));
  for (size_t i = 0; i < rows; ++i) out.duals[i] = -reduced[cols + i];
  return out;
}

}  // namespace detail

/// Exact value and optimal mixed strategies.  Both returned mixes certify the
/// value: the best row payoff against the column mix equals the value equals
/// the worst column payoff against the row mix (checked before returning).
inline MatrixSolution solve_matrix(const MatrixGame& g) {
  const size_t rows = g.rows(), cols = g.cols();
  if (rows == 0 || cols == 0) throw DomainError("empty game");
  for (const auto& row : g.payoffs)
    if (row.size() != cols) throw DomainError("ragged payoff matrix");

  Rat shift = 0;
  for (const auto& row : g.payoffs)
    for (const Rat& x : row) shift = rat_min(shift, x);
  shift = 1 - shift;  // entries + shift >= 1

  std::vector<std::vector<Rat>> b(rows, std::vector<Rat>(cols));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) b[i][j] = g.payoffs[i][j] + shift;

  auto lp = detail::solve_shifted(b);
  if (lp.objective <= 0) throw DefectError("nonpositive LP objective");

  MatrixSolution s;
  s.value = Rat(1) / lp.objective - shift;
  s.col_mix.assign(cols, Rat(0));
  for (size_t j = 0; j < cols; ++j) s.col_mix[j] = lp.w[j] / lp.objective;
  s.row_mix.assign(rows, Rat(0));
  for (size_t i = 0; i < rows; ++i) s.row_mix[i] = lp.duals[i] / lp.objective;

  // Certificate check: exact equilibrium conditions.
  Rat rsum = 0, csum = 0;
  for (const Rat& x : s.row_mix) {
    if (x < 0) throw DefectError("negative row weight");
    rsum += x;
  }
  for (const Rat& x : s.col_mix) {
    if (x < 0) throw DefectError("negative column weight");
    csum += x;
  }
  if (rsum != 1 || csum != 1) throw DefectError("strategy mix not normalized");
  for (size_t j = 0; j < cols; ++j) {
    Rat pay = 0;
    for (size_t i = 0; i < rows; ++i) pay += s.row_mix[i] * g.payoffs[i][j];
    if (pay < s.value) throw DefectError("row mix fails to guarantee value");
  }
  for (size_t i = 0; i < rows; ++i) {
    Rat pay = 0;
    for (size_t j = 0; j < cols; ++j) pay += s.col_mix[j] * g.payoffs[i][j];
    if (pay > s.value) throw DefectError("column mix fails to guarantee value");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Double oracle

template <typename T>
struct BestResponse {
  T strategy;
  Rat value;  // payoff it achieves against the opponent mix
};

/// Opponent mixes are handed to the oracles as (strategy index, weight) pairs
/// referring to the current universes.
template <typename RowS, typename ColS>
struct OracleGame {
  std::vector<RowS> rows;  // seed strategies; grows during solving
  std::vector<ColS> cols;
  std::function<Rat(const RowS&, const ColS&)> payoff;
  std::function<BestResponse<RowS>(const std::vector<std::pair<size_t, Rat>>&)>
      row_oracle;  // maximizer best response to a column mix
  std::function<BestResponse<ColS>(const std::vector<std::pair<size_t, Rat>>&)>
      col_oracle;  // minimizer best response to a row mix
  std::function<std::string(const RowS&)> row_key;
  std::function<std::string(const ColS&)> col_key;
};

template <typename RowS, typename ColS>
struct DoubleOracleResult {
  Rat lo, hi;      // value bracket; lo == hi when certified at tolerance 0
  bool certified = false;
  std::vector<std::pair<size_t, Rat>> row_mix;  // over game.rows
  std::vector<std::pair<size_t, Rat>> col_mix;  // over game.cols
  size_t iterations = 0;
};

inline constexpr size_t kDefaultOracleRounds = 10'000;

/// Alternately adds exact best responses until neither side can improve the
/// restricted game by more than the tolerance.
template <typename RowS, typename ColS>
DoubleOracleResult<RowS, ColS> double_oracle(OracleGame<RowS, ColS>& game,
                                             const Rat& tolerance = Rat(0),
                                             size_t max_rounds = kDefaultOracleRounds) {
  if (tolerance < 0) throw DomainError("negative tolerance");
  if (game.rows.empty() || game.cols.empty())
    throw DomainError("double oracle needs seed strategies on both sides");

  std::set<std::string> row_seen, col_seen;
  for (const auto& r : game.rows) row_seen.insert(game.row_key(r));
  for (const auto& c : game.cols) col_seen.insert(game.col_key(c));

  std::vector<std::vector<Rat>> pay;  // cached restricted payoff matrix
  auto extend_matrix = [&] {
    pay.resize(game.rows.size());
    for (size_t i = 0; i < game.rows.size(); ++i) {
      pay[i].reserve(game.cols.size());
      while (pay[i].size() < game.cols.size())
        pay[i].push_back(game.payoff(game.rows[i], game.cols[pay[i].size()]));
    }
  };

  DoubleOracleResult<RowS, ColS> res;
  for (size_t round = 0; round < max_rounds; ++round) {
    res.iterations = round + 1;
    extend_matrix();
    MatrixGame mg{pay, {}, {}};
    MatrixSolution sol = solve_matrix(mg);

    std::vector<std::pair<size_t, Rat>> rmix, cmix;
    for (size_t i = 0; i < sol.row_mix.size(); ++i)
      if (sol.row_mix[i] > 0) rmix.emplace_back(i, sol.row_mix[i]);
    for (size_t j = 0; j < sol.col_mix.size(); ++j)
      if (sol.col_mix[j] > 0) cmix.emplace_back(j, sol.col_mix[j]);

    BestResponse<RowS> rb = game.row_oracle(cmix);
    BestResponse<ColS> cb = game.col_oracle(rmix);
    if (rb.value < sol.value || cb.value > sol.value)
      throw DefectError("oracle returned a non-best response");

    res.lo = cb.value;
    res.hi = rb.value;
    res.row_mix = rmix;
    res.col_mix = cmix;
    if (rb.value - cb.value <= tolerance) {
      res.certified = true;
      return res;
    }

    bool grew = false;
    if (row_seen.insert(game.row_key(rb.strategy)).second) {
      game.rows.push_back(std::move(rb.strategy));
      grew = true;
    }
    if (col_seen.insert(game.col_key(cb.strategy)).second) {
      game.cols.push_back(std::move(cb.strategy));
      grew = true;
    }
    if (!grew)
      throw DefectError("double oracle stalled without certifying");
  }
  res.certified = false;
  return res;
}

// ---------------------------------------------------------------------------
// Randomized query complexity via the error game

struct LevelValue {
  int depth = 0;
  Rat value;       // exact max_mu min_{depth<=l trees} distributional error
  bool certified = true;
};

struct RandomizedComplexity {
  int value = 0;                  // least depth with game value <= eps
  bool certified = true;
  std::vector<LevelValue> levels;  // values for depths 0..value
};

/// Exact error-game value at a fixed depth budget: rows are inputs, columns
/// are depth-bounded trees generated by the distributional best response.
inline LevelValue error_game_value(const Problem& h, int depth_budget,
                                   const TreeSearchBudget& budget = {},
                                   size_t max_rounds = kDefaultOracleRounds) {
  using Col = DecisionTree;
  OracleGame<std::string, Col> game;
  auto inputs = all_strings(h.arity);

  game.payoff = [&h](const std::string& z, const Col& t) {
    auto r = t.eval(z);
    bool ok = r.label && h.contains(z, *r.label);
    return ok ? Rat(0) : Rat(1);
  };
  game.row_key = [](const std::string& z) { return z; };
  game.col_key = [](const Col& t) { return t.to_text(); };
  game.row_oracle = [&](const std::vector<std::pair<size_t, Rat>>& cmix) {
    BestResponse<std::string> best;
    bool first = true;
    for (const auto& z : inputs) {
      Rat err = 0;
      for (const auto& [j, w] : cmix) err += w * game.payoff(z, game.cols[j]);
      if (first || err > best.value) {
        best = {z, err};
        first = false;
      }
    }
    return best;
  };
  game.col_oracle = [&](const std::vector<std::pair<size_t, Rat>>& rmix) {
    std::map<std::string, Rat> w;
    for (const auto& [i, wt] : rmix) w[game.rows[i]] += wt;
    Dist mu(h.arity, std::move(w));
    auto opt = distributional_opt(h, mu, depth_budget, budget);
    return BestResponse<Col>{std::move(opt.tree), opt.error};
  };

  game.rows.push_back(inputs.front());
  {
    Dist seed = Dist::point(inputs.front());
    game.cols.push_back(distributional_opt(h, seed, depth_budget, budget).tree);
  }
  auto res = double_oracle(game, Rat(0), max_rounds);
  return LevelValue{depth_budget, res.certified ? res.lo : res.hi, res.certified};
}

/// R_eps(h) as the least depth whose error-game value is <= eps.
inline RandomizedComplexity randomized_complexity(const Problem& h, const Rat& eps,
                                                  const TreeSearchBudget& budget = {},
                                                  size_t max_rounds = kDefaultOracleRounds) {
  if (eps < 0 || eps >= Rat(1, 2)) throw DomainError("eps must lie in [0, 1/2)");
  RandomizedComplexity out;
  for (int l = 0; l <= h.arity; ++l) {
    LevelValue lv = error_game_value(h, l, budget, max_rounds);
    out.levels.push_back(lv);
    if (!lv.certified) out.certified = false;
    if (lv.value <= eps) {
      out.value = l;
      return out;
    }
  }
  throw DefectError("full-depth error game value positive");
}

}  // namespace qclab
