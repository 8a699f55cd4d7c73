#include <gtest/gtest.h>

#include <sstream>

#include "lossbound/learners.hpp"
#include "lossbound/opponents.hpp"
#include "lossbound/sim.hpp"
#include "lossbound/verify.hpp"

using namespace lossbound;

namespace {

std::string csv_of(const Trace& t) {
  std::ostringstream out;
  write_trace_csv_header(out);
  write_trace_csv_rows(out, t, 0);
  return out.str();
}

std::vector<int> identity(int size) {
  std::vector<int> f(size);
  for (int i = 0; i < size; ++i) f[i] = i + 1;
  return f;
}

}  // namespace

TEST(RunEpisode, GetCloseLearnsWithinBound) {
  const FamilyParams p = GetCloseParams{16, 11};
  const BinarySearchLearner l(16);
  const Opponent o(worst_case_dp(p, l, 20).policy, p);
  const Trace t = run_episode(p, l, o, 20, 0);
  ASSERT_EQ(t.rows.size(), 20u);
  EXPECT_GT(t.learned_round(), 0);
  EXPECT_LE(t.rows[t.learned_round() - 1].cum_loss, 4.0);
  EXPECT_TRUE(t.rows.back().learned);
}

TEST(RunEpisode, SameSeedSameTrace) {
  const FamilyParams p = TwoTargetsParams{8, 5, 2, 0.8, 0.2, 2, 1};
  const TwoTargetsLearner l(8, 0.8, 0.2, 2, 1);
  const Opponent o(UniformRandomPolicy{}, p);
  EXPECT_EQ(csv_of(run_episode(p, l, o, 50, 42)), csv_of(run_episode(p, l, o, 50, 42)));
  EXPECT_NE(csv_of(run_episode(p, l, o, 50, 42)), csv_of(run_episode(p, l, o, 50, 43)));
}

TEST(RunEpisode, TraceAccountingInvariants) {
  const std::vector<FamilyParams> games = {
      GetCloseParams{9, 4}, MpDudsParams{3, 2, {2, 5}}, TwoTargetsParams{6, 2, 5, 0.6, 0.4, 4, 1},
      RpsDudsParams{3, 2, {5, 3, 1, 4, 2}}, RandomOrientationRpsDudsParams{4, 1, {2, 5, 1, 3, 4}}};
  for (const auto& p : games) {
    const AnyLearner l = make_learner({default_learner_name(family_kind(p))}, p);
    const double value = game_value(p);
    for (const Opponent& o : {Opponent(UniformRandomPolicy{}, p), Opponent(BestResponsePolicy{}, p)}) {
      const Trace t = run_episode(p, l, o, 60, 9);
      double sum = 0.0;
      int epoch = 0;
      for (const auto& r : t.rows) {
        EXPECT_DOUBLE_EQ(r.loss, value - r.u1);
        sum += r.loss;
        EXPECT_NEAR(r.cum_loss, sum, 1e-12);
        EXPECT_GE(r.epoch, epoch);
        epoch = r.epoch;
      }
      EXPECT_DOUBLE_EQ(t.header.value, value);
    }
  }
}

// For the guaranteed families every realized trace, not just the mean,
// stays within the bound up to the learning round.
TEST(RunEpisode, RealizedLossBeforeLearningWithinGuaranteedBound) {
  struct Case {
    FamilyParams shape;
    double bound;
  };
  const std::vector<Case> cases = {{GetCloseParams{12, 1}, 4.0},
                                   {RpsDudsParams{3, 2, identity(5)}, 3.0},
                                   {RpsDudsParams{4, 1, identity(5)}, 3.0},
                                   {RandomOrientationRpsDudsParams{3, 1, identity(4)}, 1.0}};
  for (const auto& c : cases) {
    for (const auto& p : enumerate_hidden(c.shape)) {
      const AnyLearner l = make_learner({default_learner_name(family_kind(p))}, p);
      for (const Opponent& o : {Opponent(UniformRandomPolicy{}, p), Opponent(BestResponsePolicy{}, p)}) {
        const Trace t = run_episode(p, l, o, 40, 5);
        double before = 0.0;
        for (const auto& r : t.rows) {
          before += r.loss;
          if (r.learned) break;
        }
        ASSERT_LE(before, c.bound + 1e-12);
      }
    }
  }
}

TEST(RunEpisode, NatureScriptOverridesNature) {
  const FamilyParams p = TwoTargetsParams{4, 3, 1, 0.6, 0.4, 4, 1};
  EpisodeOptions opt;
  opt.nature_script = {NatureDraw::target(2)};
  const Trace t = run_episode(p, TwoTargetsLearner(4, 0.6, 0.4, 4, 1),
                              Opponent(MiddleCamperPolicy{}, p), 30, 1, opt);
  for (const auto& r : t.rows) EXPECT_EQ(r.nature, NatureDraw::target(2));
  EXPECT_THROW(run_episode(p, UniformLearner(4), Opponent(MiddleCamperPolicy{}, p), 0, 1),
               InvalidArgument);
}

TEST(MonteCarlo, OmniscientHasNoExpectedLoss) {
  const FamilyParams p = TwoTargetsParams{4, 3, 1, 0.6, 0.4, 4, 1};
  const auto mc = monte_carlo_loss(p, OmniscientLearner(p), Opponent(BestResponsePolicy{}, p), 100,
                                   2000, 3);
  EXPECT_LE(mc.mean, 3 * mc.standard_error + 1e-9);
}

TEST(MonteCarlo, UniformOnMatchingPenniesBreaksEven) {
  const FamilyParams p = MpDudsParams{2, 0, {}};
  const auto mc = monte_carlo_loss(p, UniformLearner(2), Opponent(BestResponsePolicy{}, p), 10,
                                   20'000, 4);
  EXPECT_NEAR(mc.mean, 0.0, 3 * mc.standard_error);
}

TEST(MonteCarlo, MpDudsWorstCaseNearHalf) {
  const FamilyParams p = MpDudsParams{2, 1, {3}};
  const DudEliminationLearner l(2, 1);
  const Opponent o(worst_case_dp(p, l, 30).policy, p);
  const auto mc = monte_carlo_loss(p, l, o, 30, 100'000, 11);
  EXPECT_NEAR(mc.mean, 0.5, 3 * mc.standard_error);
  EXPECT_EQ(mc.episodes, 100'000);
  EXPECT_EQ(mc.rounds, 30);
}

TEST(MonteCarlo, TwoTargetsBelowBound) {
  const FamilyParams p = TwoTargetsParams{4, 3, 1, 0.6, 0.4, 4, 1};
  const TwoTargetsLearner l(4, 0.6, 0.4, 4, 1);
  const Opponent o(worst_case_dp(p, l, 200).policy, p);
  const auto mc = monte_carlo_loss(p, l, o, 200, 10'000, 12);
  EXPECT_LE(mc.mean, 8.0 + 3 * mc.standard_error);
}

TEST(MonteCarlo, ResultIndependentOfThreadCount) {
  const FamilyParams p = MpDudsParams{3, 1, {2}};
  const DudEliminationLearner l(3, 1);
  const Opponent o(UniformRandomPolicy{}, p);
  const auto a = monte_carlo_loss(p, l, o, 20, 500, 8, 1);
  const auto b = monte_carlo_loss(p, l, o, 20, 500, 8, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
  // Episode i alone reproduces its part of the estimate.
  EXPECT_EQ(episode_loss(p, l, o, 20, split_seed(8, 7), game_value(p)),
            run_episode(p, l, o, 20, split_seed(8, 7)).cumulative_loss());
  EXPECT_THROW(monte_carlo_loss(p, l, o, 20, 1, 8), InvalidArgument);
}

TEST(Export, CsvAndSidecar) {
  const FamilyParams p = GetCloseParams{4, 2};
  const Trace t = run_episode(p, BinarySearchLearner(4), Opponent(ScriptedPolicy{{3}}, p), 2, 0,
                              {"binary_search"});
  EXPECT_EQ(csv_of(t),
            "episode,round,a1,a2,nature,u1,loss,cum_loss,epoch,learned\n"
            "0,1,2,3,none,1,-1,-1,0,0\n"
            "0,2,2,3,none,1,-1,-2,0,0\n");
  const Json side = trace_sidecar(t.header, 1);
  EXPECT_EQ(side["params"]["k"], 2);
  EXPECT_EQ(side["learner"], "binary_search");
  EXPECT_EQ(side["opponent"], "scripted");
  EXPECT_EQ(side["columns"].size(), 10u);
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333333333");
}
