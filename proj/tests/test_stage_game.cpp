#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "lossbound/families.hpp"
#include "lossbound/stage_game.hpp"
#include "oracles.hpp"

using namespace lossbound;

namespace {

StageGame matrix_game(const std::vector<std::vector<double>>& m) {
  std::vector<double> flat;
  for (const auto& row : m) flat.insert(flat.end(), row.begin(), row.end());
  return StageGame::deterministic(m.size(), m[0].size(), flat);
}

std::vector<std::vector<double>> random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
  for (auto& row : m)
    for (double& v : row) v = u(rng);
  return m;
}

StageGame matching_pennies() { return to_stage_game(MpDudsParams{2, 0, {}}); }

StageGame classic_rps() {
  return matrix_game({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
}

}  // namespace

TEST(MixedStrategy, RejectsInvalidDistributions) {
  EXPECT_THROW(MixedStrategy({0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(MixedStrategy({1.5, -0.5}), InvalidArgument);
  EXPECT_THROW(MixedStrategy(std::vector<double>{}), InvalidArgument);
  EXPECT_NO_THROW(MixedStrategy({0.25, 0.75}));
}

TEST(MixedStrategy, Factories) {
  EXPECT_EQ(MixedStrategy::pure(3, 1).probs(), (std::vector<double>{0, 1, 0}));
  EXPECT_TRUE(MixedStrategy::pure(3, 1).is_pure());
  const std::vector<std::size_t> support{0, 2};
  EXPECT_EQ(MixedStrategy::uniform_over(4, support).probs(), (std::vector<double>{0.5, 0, 0.5, 0}));
  EXPECT_EQ(MixedStrategy::normalized({2, -1e-15, 2}).probs(), (std::vector<double>{0.5, 0, 0.5}));
}

TEST(StageGame, RejectsMalformedEntries) {
  EXPECT_THROW(StageGame(1, 1, {{{0.5, 1.0}}}), InvalidArgument);
  EXPECT_THROW(StageGame(2, 1, {{{1.0, 1.0}}}), InvalidArgument);
  EXPECT_THROW(StageGame::deterministic(0, 1, {}), InvalidArgument);
}

TEST(ExpectedMatrix, DeterministicGameUnchanged) {
  const StageGame g = matrix_game({{1, 2}, {3, 4}});
  const StageGame e = expected_matrix(g);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(e.expected(i, j), g.expected(i, j));
  EXPECT_TRUE(e.is_deterministic());
}

TEST(ExpectedMatrix, SymmetricCoinHasMeanZero) {
  const StageGame g(1, 1, {{{0.5, 1.0}, {0.5, -1.0}}});
  EXPECT_EQ(expected_matrix(g).expected(0, 0), 0.0);
}

TEST(ExpectedMatrix, RandomOrientationEntry) {
  const FamilyParams p = RandomOrientationRpsDudsParams{3, 0, {1, 2, 3}};
  // Enumerate both coins through the outcome rule.
  const double plus = resolve_outcome(p, 2, 1, NatureDraw::orientation(1)).u1;
  const double minus = resolve_outcome(p, 2, 1, NatureDraw::orientation(-1)).u1;
  EXPECT_EQ(plus, 1.0);
  EXPECT_EQ(minus, -1.0);
  const StageGame g = to_stage_game(p);
  EXPECT_FALSE(g.is_deterministic());
  EXPECT_EQ(expected_matrix(g).expected(1, 0), 0.5 * plus + 0.5 * minus);
}

TEST(ExpectedMatrix, PreservesValueOfStochasticGames) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<Lottery> entries;
    for (int e = 0; e < 9; ++e) entries.push_back({{0.3, u(rng)}, {0.7, u(rng)}});
    const StageGame g(3, 3, entries);
    EXPECT_NEAR(solve_maximin(g).value, solve_maximin(expected_matrix(g)).value, 1e-9);
  }
}

TEST(SolveMaximin, MatchingPenniesValueIsExactlyHalf) {
  const SolveResult s = solve_maximin(matching_pennies());
  EXPECT_EQ(s.value, 0.5);
  EXPECT_NEAR(s.strategy1[0], 0.5, 1e-12);
  EXPECT_NEAR(s.strategy2[0], 0.5, 1e-12);
}

TEST(SolveMaximin, ClassicRpsIsUniformWithValueZero) {
  const SolveResult s = solve_maximin(classic_rps());
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.strategy1[i], 1.0 / 3.0, 1e-12);
}

TEST(SolveMaximin, TwoByTwoMatchesSupportEnumeration) {
  const std::vector<std::vector<double>> m{{3, 1}, {1, 2}};
  const SolveResult s = solve_maximin(matrix_game(m));
  EXPECT_NEAR(s.value, oracle::support_enumeration_value(m), 1e-12);
  EXPECT_NEAR(s.value, 5.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.strategy1[0], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.strategy1[1], 2.0 / 3.0, 1e-12);
}

TEST(SolveMaximin, RejectsEmptyActionSets) {
  EXPECT_THROW(solve_maximin(StageGame{}), InvalidArgument);
}

TEST(SolveMaximin, RandomGamesAgreeWithOracleAndAreUnexploitable) {
  std::mt19937_64 rng(20240501);
  for (int t = 0; t < 100; ++t) {
    const auto m = random_matrix(rng, 4, 4);
    const StageGame g = matrix_game(m);
    const SolveResult s = solve_maximin(g);
    EXPECT_NEAR(s.value, oracle::support_enumeration_value(m), 1e-9) << "game " << t;
    EXPECT_LE(exploitability(g, s.strategy1, s.value), 1e-9);
    const auto rows = row_payoffs(g, s.strategy2);
    EXPECT_LE(*std::max_element(rows.begin(), rows.end()), s.value + 1e-9);
  }
}

TEST(SolveMaximin, RectangularGamesAgreeWithOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto m = random_matrix(rng, 2 + t % 3, 5 - t % 3);
    EXPECT_NEAR(solve_maximin(matrix_game(m)).value, oracle::support_enumeration_value(m), 1e-9);
  }
}

TEST(SolveMaximin, DualityUnderNegatedTranspose) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const StageGame g = matrix_game(random_matrix(rng, 4, 4));
    EXPECT_NEAR(solve_maximin(g).value, -solve_maximin(negated_transpose(g)).value, 1e-9);
  }
}

TEST(Exploitability, InvariantUnderColumnPermutation) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    auto m = random_matrix(rng, 4, 4);
    const StageGame g = matrix_game(m);
    const MixedStrategy s = MixedStrategy::normalized({0.1, 0.2, 0.3, 0.4});
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    auto pm = m;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) pm[i][j] = m[i][perm[j]];
    EXPECT_NEAR(exploitability(g, s), exploitability(matrix_game(pm), s), 1e-9);
  }
}

TEST(Exploitability, Examples) {
  const StageGame mp = matching_pennies();
  EXPECT_NEAR(exploitability(mp, MixedStrategy::uniform(2)), 0.0, 1e-12);
  EXPECT_NEAR(exploitability(mp, MixedStrategy::pure(2, 0)), 0.5, 1e-12);
  const StageGame gc = to_stage_game(GetCloseParams{3, 2});
  EXPECT_NEAR(solve_maximin(gc).value, 0.0, 1e-12);
  EXPECT_NEAR(exploitability(gc, MixedStrategy::pure(3, 1)), 0.0, 1e-12);
  EXPECT_GE(exploitability(gc, MixedStrategy::uniform(3)), -1e-12);
}

TEST(BestResponse, Examples) {
  // Player 2 wins matching pennies by matching.
  auto [a, u] = best_response(matching_pennies(), MixedStrategy::pure(2, 0), Player::Two);
  EXPECT_EQ(a, 0u);
  EXPECT_NEAR(u, 1.0, 1e-12);

  auto [b, v] = best_response(classic_rps(), MixedStrategy::uniform(3), Player::Two);
  EXPECT_EQ(b, 0u);
  EXPECT_NEAR(v, 0.0, 1e-12);

  auto [c, w] = best_response(to_stage_game(GetCloseParams{5, 3}), MixedStrategy::pure(5, 0),
                              Player::Two);
  EXPECT_EQ(c, 1u);
  EXPECT_NEAR(w, 1.0, 1e-12);

  auto [d, x] = best_response(matrix_game({{3, 1}, {1, 2}}), MixedStrategy::pure(2, 0), Player::One);
  EXPECT_EQ(d, 0u);
  EXPECT_NEAR(x, 3.0, 1e-12);
}
