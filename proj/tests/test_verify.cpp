#include <gtest/gtest.h>

#include "lossbound/verify.hpp"
#include "oracles.hpp"

using namespace lossbound;

namespace {

std::vector<int> identity(int size) {
  std::vector<int> f(size);
  for (int i = 0; i < size; ++i) f[i] = i + 1;
  return f;
}

std::vector<int> horizons(int lo, int hi) {
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

BoundReport sweep_guaranteed(const FamilyParams& shape, const LearnerSpec& spec, double bound) {
  return sweep_reports(enumerate_hidden(shape), [&](const FamilyParams& p) {
    return check_guaranteed(p, make_learner(spec, p), bound);
  });
}

}  // namespace

TEST(CheckGuaranteed, GetCloseMatchesTreeOracle) {
  for (int n = 2; n <= 20; ++n) {
    const BoundReport r = sweep_guaranteed(GetCloseParams{n, 1}, {"binary_search"}, ceil_log2(n));
    EXPECT_TRUE(r.pass) << "n=" << n;
    EXPECT_EQ(r.measured, oracle::get_close_worst_loss(n)) << "n=" << n;
  }
}

TEST(CheckGuaranteed, GetCloseSixteenIsTight) {
  const BoundReport r = sweep_guaranteed(GetCloseParams{16, 1}, {"binary_search"}, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.measured, 4.0);
  EXPECT_EQ(r.games, 16);
  EXPECT_FALSE(sweep_guaranteed(GetCloseParams{16, 1}, {"binary_search"}, 3).pass);
}

TEST(CheckGuaranteed, RpsAndRandomOrientationExamples) {
  EXPECT_TRUE(sweep_guaranteed(RpsDudsParams{3, 1, identity(4)}, {"chase_winner"}, 3).pass);
  EXPECT_TRUE(sweep_guaranteed(RpsDudsParams{4, 1, identity(5)}, {"chase_winner"}, 3).pass);
  EXPECT_TRUE(
      sweep_guaranteed(RandomOrientationRpsDudsParams{3, 1, identity(4)}, {"random_orientation"}, 1)
          .pass);
  EXPECT_TRUE(
      sweep_guaranteed(RandomOrientationRpsDudsParams{3, 0, identity(3)}, {"random_orientation"}, 0)
          .pass);
}

TEST(CheckGuaranteed, UnboundedWhenOpponentCanCycle) {
  const FamilyParams p = MpDudsParams{2, 1, {3}};
  const BoundReport r = check_guaranteed(p, DudEliminationLearner(2, 1), 1.0);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(std::isinf(r.measured));
  EXPECT_EQ(report_to_json(r)["measured"], "inf");
}

TEST(CheckGuaranteed, StateCapRaises) {
  CheckOptions opt;
  opt.state_cap = 2;
  EXPECT_THROW(check_guaranteed(GetCloseParams{16, 3}, BinarySearchLearner(16), 4, opt), CapExceeded);
}

TEST(CheckExpected, MpDudsSupIsHalf) {
  const BoundReport r =
      check_expected(MpDudsParams{2, 1, {3}}, DudEliminationLearner(2, 1), 1.0, horizons(1, 30));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.method, CheckMethod::Dp);
  ASSERT_EQ(r.by_horizon.size(), 30u);
  for (const auto& [n, w] : r.by_horizon) EXPECT_NEAR(w, oracle::mp_duds_geometric(n), 1e-12);
  EXPECT_NEAR(r.measured, 0.5, 1e-5);
}

TEST(CheckExpected, TwoTargetsAndWrappedGetClose) {
  const FamilyParams tt = TwoTargetsParams{4, 3, 1, 0.6, 0.4, 4, 1};
  EXPECT_TRUE(check_expected(tt, TwoTargetsLearner(4, 0.6, 0.4, 4, 1), 8.0, horizons(1, 12)).pass);
  for (int k = 1; k <= 4; ++k)
    EXPECT_TRUE(check_expected(GetCloseParams{4, k}, wrap_with_maximin(BinarySearchLearner(4)), 2.0,
                               horizons(1, 20))
                    .pass);
}

TEST(CheckExpected, FallsBackToMonteCarloPastCap) {
  CheckOptions opt;
  opt.state_cap = 1;
  opt.mc_episodes = 10'000;
  const BoundReport r =
      check_expected(MpDudsParams{2, 1, {3}}, DudEliminationLearner(2, 1), 1.0, {10}, opt);
  EXPECT_EQ(r.method, CheckMethod::MonteCarlo);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.tolerance, 0.0);
  EXPECT_NE(r.detail.find("3*SE"), std::string::npos);
}

TEST(LemmaRatio, MpDudsRows) {
  const auto reports = lemma_ratio_check(MpDudsParams{2, 1, {3}}, DudEliminationLearner(2, 1), {1, 0});
  ASSERT_FALSE(reports.empty());
  EXPECT_TRUE(all_pass(reports));
  const auto& first = reports.front();
  EXPECT_EQ(first.epoch, 0);
  ASSERT_EQ(first.rows.size(), 3u);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(first.rows[a].lambda, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(first.rows[a].p, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(first.rows[a].ratio(), 0.5, 1e-12);
  }
  EXPECT_TRUE(first.rows[2].no_advantage());
  EXPECT_NEAR(first.rows[2].lambda, -1.0 / 6.0, 1e-12);
  // With c_0 below 1/2 the ratio condition fails.
  EXPECT_FALSE(all_pass(lemma_ratio_check(MpDudsParams{2, 1, {3}}, DudEliminationLearner(2, 1), {0.4, 0})));
}

TEST(LemmaRatio, TwoTargetsWithRewardConstants) {
  for (const auto& p : enumerate_hidden(TwoTargetsParams{4, 1, 2, 0.6, 0.4, 4, 1})) {
    const auto claim = theorem_claim({"two_targets"}, p);
    ASSERT_TRUE(claim);
    EXPECT_EQ(claim->lemma_constants, (std::vector<double>{4, 4, 0}));
    EXPECT_TRUE(all_pass(lemma_ratio_check(p, TwoTargetsLearner(4, 0.6, 0.4, 4, 1), claim->lemma_constants)));
  }
}

TEST(LemmaRatio, MissingConstantFails) {
  EXPECT_FALSE(all_pass(lemma_ratio_check(MpDudsParams{2, 1, {3}}, DudEliminationLearner(2, 1), {1})));
}

TEST(CheckApproximate, Examples) {
  const BoundReport r = sweep_reports(enumerate_hidden(GetCloseParams{16, 1}), [](const FamilyParams& p) {
    return check_approximate(p, ApproxBinarySearchLearner(16, 2), 2, 0.75, {});
  });
  EXPECT_TRUE(r.pass);
  EXPECT_LE(*r.exploitability, 0.75 + 1e-9);

  const FamilyParams p = GetCloseParams{16, 7};
  EXPECT_TRUE(check_approximate(p, wrap_with_maximin(ApproxBinarySearchLearner(16, 2)), 2, 0.75,
                                horizons(1, 40))
                  .pass);

  for (const auto& g : enumerate_hidden(GetCloseParams{16, 1})) {
    const BoundReport z = check_approximate(g, ApproxBinarySearchLearner(16, 0), 0, 0.9375, {});
    EXPECT_TRUE(z.pass);
    EXPECT_NEAR(*z.exploitability, exploitability(to_stage_game(g), MixedStrategy::uniform(16)), 1e-12);
  }
  EXPECT_FALSE(check_approximate(p, ApproxBinarySearchLearner(16, 2), 2, 0.5, {}).pass);
}

// Lemma pass with constants c implies the expected check at sum(c), and a
// guaranteed pass implies the expected check of the wrapped learner.
TEST(Consistency, LemmaAndGuaranteedImplyExpected) {
  const std::vector<FamilyParams> lemma_games = {MpDudsParams{2, 2, {1, 3}}, MpDudsParams{3, 1, {2}},
                                                 TwoTargetsParams{5, 4, 2, 0.8, 0.2, 2, 1}};
  for (const auto& p : lemma_games) {
    const LearnerSpec spec{default_learner_name(family_kind(p))};
    const auto claim = theorem_claim(spec, p);
    const AnyLearner l = make_learner(spec, p);
    if (!all_pass(lemma_ratio_check(p, l, claim->lemma_constants))) continue;
    double sum = 0.0;
    for (double c : claim->lemma_constants) sum += c;
    EXPECT_TRUE(check_expected(p, l, sum, horizons(1, 12)).pass);
  }
  const std::vector<FamilyParams> guaranteed_games = {
      GetCloseParams{11, 8}, RpsDudsParams{4, 2, {6, 2, 1, 5, 3, 4}},
      RandomOrientationRpsDudsParams{3, 1, {2, 4, 1, 3}}};
  for (const auto& p : guaranteed_games) {
    const LearnerSpec spec{default_learner_name(family_kind(p))};
    const double bound = theorem_claim(spec, p)->bound;
    const AnyLearner l = make_learner(spec, p);
    ASSERT_TRUE(check_guaranteed(p, l, bound).pass);
    EXPECT_TRUE(check_expected(p, wrap_with_maximin(l), bound, horizons(1, 12)).pass);
  }
}

TEST(TheoremClaim, Values) {
  EXPECT_EQ(theorem_claim({"binary_search"}, GetCloseParams{17, 1})->bound, 5);
  EXPECT_EQ(theorem_claim({"chase_winner"}, RpsDudsParams{4, 1, identity(5)})->bound, 3);
  EXPECT_EQ(theorem_claim({"chase_winner"}, RpsDudsParams{5, 1, identity(6)})->bound, 5);
  EXPECT_EQ(theorem_claim({"chase_winner"}, RpsDudsParams{5, 0, identity(5)})->bound, 0);
  const auto approx = theorem_claim({"approx_binary_search", 3}, GetCloseParams{16, 1});
  EXPECT_EQ(approx->kind, CheckKind::Approximate);
  EXPECT_EQ(approx->epsilon, 0.5);
  EXPECT_EQ(theorem_claim({"dud_elimination"}, MpDudsParams{2, 2, {1, 2}})->lemma_constants,
            (std::vector<double>{1, 1, 0}));
  EXPECT_FALSE(theorem_claim({"uniform"}, GetCloseParams{4, 1}));
}

TEST(Reports, ReproducibleJson) {
  const FamilyParams p = TwoTargetsParams{4, 3, 1, 0.6, 0.4, 4, 1};
  const auto once = report_to_json(check_expected(p, TwoTargetsLearner(4, 0.6, 0.4, 4, 1), 8, horizons(1, 6))).dump();
  const auto twice = report_to_json(check_expected(p, TwoTargetsLearner(4, 0.6, 0.4, 4, 1), 8, horizons(1, 6))).dump();
  EXPECT_EQ(once, twice);
  const Json lemma = lemma_to_json(MpDudsParams{2, 1, {3}}, "dud_elimination",
                                   lemma_ratio_check(MpDudsParams{2, 1, {3}}, DudEliminationLearner(2, 1), {1, 0}));
  EXPECT_EQ(lemma["check"], "lemma");
  EXPECT_EQ(lemma["epochs"][0]["rows"][2]["ratio"], "no-advantage");
  EXPECT_TRUE(lemma["pass"].get<bool>());
}
