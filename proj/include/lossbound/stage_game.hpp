#pragma once

// Finite zero-sum stage games: representation, maximin solving, best
// responses and exploitability.
//
// Action indices at this layer are 0-based matrix indices. Payoffs are
// player 1 utilities; player 2 is treated as the minimizer of player 1's
// expected utility.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lossbound/error.hpp"

namespace lossbound {

inline constexpr double kProbabilityTolerance = 1e-12;
inline constexpr double kSolveTolerance = 1e-9;
inline constexpr double kTieTolerance = 1e-12;

enum class Player { One = 1, Two = 2 };

struct Outcome {
  double prob = 1.0;
  double u1 = 0.0;
};

// Distribution over player 1 utilities. A single outcome with prob 1 is a
// deterministic entry.
using Lottery = std::vector<Outcome>;

inline double expectation(const Lottery& lottery) {
  double sum = 0.0;
  for (const auto& o : lottery) sum += o.prob * o.u1;
  return sum;
}

class MixedStrategy {
 public:
  MixedStrategy() = default;

  explicit MixedStrategy(std::vector<double> probs) : probs_(std::move(probs)) {
    require(!probs_.empty(), "mixed strategy over an empty action set");
    double sum = 0.0;
    for (double p : probs_) {
      require(p >= 0.0 && std::isfinite(p), "mixed strategy has a negative or non-finite entry");
      sum += p;
    }
    require(std::abs(sum - 1.0) <= kProbabilityTolerance,
            "mixed strategy probabilities sum to " + std::to_string(sum));
  }

  static MixedStrategy pure(std::size_t size, std::size_t index) {
    require(index < size, "pure strategy index out of range");
    std::vector<double> p(size, 0.0);
    p[index] = 1.0;
    return MixedStrategy(std::move(p));
  }

  static MixedStrategy uniform(std::size_t size) {
    require(size > 0, "uniform strategy over an empty action set");
    return MixedStrategy(std::vector<double>(size, 1.0 / static_cast<double>(size)));
  }

  // Uniform over the given (0-based, distinct) indices.
  static MixedStrategy uniform_over(std::size_t size, std::span<const std::size_t> support) {
    require(!support.empty(), "uniform strategy over an empty support");
    std::vector<double> p(size, 0.0);
    const double w = 1.0 / static_cast<double>(support.size());
    for (std::size_t i : support) {
      require(i < size, "support index out of range");
      p[i] = w;
    }
    return MixedStrategy(std::move(p));
  }

  // Clamps tiny negatives from floating-point solvers and rescales to sum 1.
  static MixedStrategy normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double& w : weights) {
      if (w < 0.0) w = 0.0;
      sum += w;
    }
    require(sum > 0.0, "cannot normalize an all-zero weight vector");
    for (double& w : weights) w /= sum;
    return MixedStrategy(std::move(weights));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  bool is_pure() const {
    return std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }) == 1;
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < probs_.size(); ++i)
      if (probs_[i] > 0.0) s.push_back(i);
    return s;
  }

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  std::vector<double> probs_;
};

class StageGame {
 public:
  StageGame() = default;

  StageGame(std::size_t actions1, std::size_t actions2, std::vector<Lottery> entries,
            std::optional<double> constant_sum = std::nullopt)
      : actions1_(actions1),
        actions2_(actions2),
        entries_(std::move(entries)),
        constant_sum_(constant_sum) {
    require(actions1_ > 0 && actions2_ > 0, "stage game with an empty action set");
    require(entries_.size() == actions1_ * actions2_, "stage game entry count mismatch");
    for (const auto& lottery : entries_) {
      require(!lottery.empty(), "stage game entry without outcomes");
      double sum = 0.0;
      for (const auto& o : lottery) {
        require(o.prob >= 0.0, "negative outcome probability");
        sum += o.prob;
      }
      require(std::abs(sum - 1.0) <= kProbabilityTolerance,
              "stage game entry probabilities do not sum to 1");
    }
  }

  static StageGame deterministic(std::size_t actions1, std::size_t actions2,
                                 const std::vector<double>& u1,
                                 std::optional<double> constant_sum = std::nullopt) {
    require(u1.size() == actions1 * actions2, "payoff matrix size mismatch");
    std::vector<Lottery> entries;
    entries.reserve(u1.size());
    for (double v : u1) entries.push_back({{1.0, v}});
    return StageGame(actions1, actions2, std::move(entries), constant_sum);
  }

  std::size_t actions1() const { return actions1_; }
  std::size_t actions2() const { return actions2_; }
  std::optional<double> constant_sum() const { return constant_sum_; }

  const Lottery& entry(std::size_t a1, std::size_t a2) const {
    return entries_.at(a1 * actions2_ + a2);
  }
  double expected(std::size_t a1, std::size_t a2) const { return expectation(entry(a1, a2)); }

  bool is_deterministic() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Lottery& l) { return l.size() == 1; });
  }

  // Row-major matrix of expected player 1 utilities.
  std::vector<double> expected_payoffs() const {
    std::vector<double> m;
    m.reserve(entries_.size());
    for (const auto& l : entries_) m.push_back(expectation(l));
    return m;
  }

 private:
  std::size_t actions1_ = 0;
  std::size_t actions2_ = 0;
  std::vector<Lottery> entries_;
  std::optional<double> constant_sum_;
};

struct SolveResult {
  double value = 0.0;
  MixedStrategy strategy1;
  MixedStrategy strategy2;
};

// Both players commit before Nature moves, so a stochastic entry can be
// replaced by its mean without changing any expected payoff.
inline StageGame expected_matrix(const StageGame& g) {
  if (g.is_deterministic()) return g;
  return StageGame::deterministic(g.actions1(), g.actions2(), g.expected_payoffs(),
                                  g.constant_sum());
}

namespace detail {

// Dense tableau simplex for  max 1'y  s.t.  B y <= 1, y >= 0  with B > 0.
// Returns (y, x) where x are the dual prices of the row constraints.
// Bland's rule guarantees termination on degenerate games.
inline std::pair<std::vector<double>, std::vector<double>> solve_positive_game_lp(
    const std::vector<double>& b, std::size_t rows, std::size_t cols) {
  const std::size_t vars = cols + rows;
  const std::size_t width = vars + 1;  // last column is the right-hand side
  std::vector<double> t((rows + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };

  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) at(i, j) = b[i * cols + j];
    at(i, cols + i) = 1.0;
    at(i, vars) = 1.0;
    basis[i] = cols + i;
  }
  for (std::size_t j = 0; j < cols; ++j) at(rows, j) = -1.0;

  constexpr double eps = 1e-12;
  const std::size_t max_pivots = 50 * (rows + cols) + 1000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_pivots) throw std::runtime_error("simplex failed to converge");
    std::size_t enter = vars;
    for (std::size_t j = 0; j < vars; ++j) {
      if (at(rows, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == vars) break;

    std::size_t leave = rows;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
      const double a = at(i, enter);
      if (a <= eps) continue;
      const double ratio = at(i, vars) / a;
      if (ratio < best_ratio - eps ||
          (std::abs(ratio - best_ratio) <= eps && leave < rows && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    // B > 0 keeps the problem bounded.
    if (leave == rows) throw std::runtime_error("simplex: unbounded game LP");

    const double pivot = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= pivot;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double factor = at(r, enter);
      if (factor == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= factor * at(leave, c);
    }
    basis[leave] = enter;
  }

  std::vector<double> y(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] < cols) y[basis[i]] = at(i, vars);
  std::vector<double> x(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) x[i] = at(rows, cols + i);
  return {std::move(y), std::move(x)};
}

}  // namespace detail

// Player 1's expected utility for each pure action of player 2.
inline std::vector<double> column_payoffs(const StageGame& g, const MixedStrategy& s1) {
  require(s1.size() == g.actions1(), "strategy does not match player 1's action count");
  std::vector<double> out(g.actions2(), 0.0);
  for (std::size_t i = 0; i < g.actions1(); ++i) {
    if (s1[i] == 0.0) continue;
    for (std::size_t j = 0; j < g.actions2(); ++j) out[j] += s1[i] * g.expected(i, j);
  }
  return out;
}

// Player 1's expected utility for each pure action of player 1.
inline std::vector<double> row_payoffs(const StageGame& g, const MixedStrategy& s2) {
  require(s2.size() == g.actions2(), "strategy does not match player 2's action count");
  std::vector<double> out(g.actions1(), 0.0);
  for (std::size_t i = 0; i < g.actions1(); ++i)
    for (std::size_t j = 0; j < g.actions2(); ++j) out[i] += s2[j] * g.expected(i, j);
  return out;
}

inline SolveResult solve_maximin(const StageGame& game) {
  require(game.actions1() > 0 && game.actions2() > 0, "cannot solve a game with no actions");
  const std::size_t rows = game.actions1();
  const std::size_t cols = game.actions2();
  std::vector<double> m = game.expected_payoffs();

  const double lo = *std::min_element(m.begin(), m.end());
  const double shift = 1.0 - lo;
  for (double& v : m) v += shift;

  auto [y, x] = detail::solve_positive_game_lp(m, rows, cols);
  SolveResult result;
  result.strategy1 = MixedStrategy::normalized(std::move(x));
  result.strategy2 = MixedStrategy::normalized(std::move(y));

  const auto cols_u = column_payoffs(game, result.strategy1);
  const auto rows_u = row_payoffs(game, result.strategy2);
  const double lower = *std::min_element(cols_u.begin(), cols_u.end());
  const double upper = *std::max_element(rows_u.begin(), rows_u.end());
  result.value = lower == upper ? lower : 0.5 * (lower + upper);
  return result;
}

// Pure action maximizing the responder's expected payoff against `s`, ties
// to the lowest index. Player 2's payoff is constant_sum - u1 (0 - u1 when
// the game declares no constant).
inline std::pair<std::size_t, double> best_response(const StageGame& g, const MixedStrategy& s,
                                                    Player responder) {
  std::vector<double> payoff;
  if (responder == Player::Two) {
    payoff = column_payoffs(g, s);
    const double c = g.constant_sum().value_or(0.0);
    for (double& v : payoff) v = c - v;
  } else {
    payoff = row_payoffs(g, s);
  }
  const double best = *std::max_element(payoff.begin(), payoff.end());
  for (std::size_t a = 0; a < payoff.size(); ++a)
    if (payoff[a] >= best - kTieTolerance) return {a, payoff[a]};
  return {0, payoff[0]};
}

// V minus the worst-case expected utility of `s` for player 1.
inline double exploitability(const StageGame& g, const MixedStrategy& s, double value) {
  const auto u = column_payoffs(g, s);
  return value - *std::min_element(u.begin(), u.end());
}

inline double exploitability(const StageGame& g, const MixedStrategy& s) {
  return exploitability(g, s, solve_maximin(g).value);
}

// The same game with player roles swapped: entry (j, i) = -u1(i, j).
inline StageGame negated_transpose(const StageGame& g) {
  std::vector<Lottery> entries;
  entries.reserve(g.actions1() * g.actions2());
  for (std::size_t j = 0; j < g.actions2(); ++j) {
    for (std::size_t i = 0; i < g.actions1(); ++i) {
      Lottery l = g.entry(i, j);
      for (auto& o : l) o.u1 = -o.u1;
      entries.push_back(std::move(l));
    }
  }
  return StageGame(g.actions2(), g.actions1(), std::move(entries));
}

}  // namespace lossbound
