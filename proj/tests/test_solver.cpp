#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "dond/errors.hpp"
#include "dond/replication.hpp"
#include "dond/solver.hpp"
#include "oracle/brute_force.hpp"

using namespace dond;

namespace {

const PrizeLadder kBoard({25, 500, 750});
const GameState kRoot{0b111, 0};

GameSpec spec(BankerModel b, UtilitySpec u, PrizeLadder l = kBoard, RoundSchedule s = {}) {
  if (s.rounds() == 0) s = RoundSchedule::one_at_a_time(l.size());
  return GameSpec{std::move(l), std::move(s), std::move(b), u};
}

}  // namespace

TEST(Solver, LogExpectedValueExample) {
  const auto start = std::chrono::steady_clock::now();
  const QResult q = q_values(spec(PureExpectedValue{}, LogUtility{}), kRoot);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_NEAR(q.q_deal, 6.052, 1e-3);
  EXPECT_NEAR(q.q_nodeal, 5.989, 1e-3);
  EXPECT_NEAR(q.q_nodeal, (std::log(625) + std::log(387.5) + std::log(262.5)) / 3, 1e-14);
  EXPECT_EQ(q.action, Action::Deal);
  EXPECT_LT(secs, 1.0);
}

TEST(Solver, LogOnlineExample) {
  Solver s(spec(OnlineRule{}, LogUtility{}));
  const QResult q = s.evaluate(kRoot);
  EXPECT_EQ(q.offer, 241.25);
  EXPECT_EQ(q.offer_rule, OfferRule::OnlineThree);
  EXPECT_NEAR(q.q_nodeal, 5.764893349137029, 1e-12);
  EXPECT_NEAR(q.ce_nodeal, 318.9050307257725, 1e-9);
  EXPECT_EQ(q.action, Action::NoDeal);

  const QResult a = s.evaluate(GameState{0b110, 1});
  EXPECT_NEAR(a.q_nodeal, 6.417340652476273, 1e-12);
  EXPECT_NEAR(a.q_deal, 6.246, 1e-3);
  EXPECT_EQ(a.action, Action::NoDeal);
  const QResult b = s.evaluate(GameState{0b101, 1});
  EXPECT_NEAR(b.q_nodeal, 4.9194, 1e-3);
  EXPECT_NEAR(b.q_deal, 5.63, 1e-3);
  EXPECT_EQ(b.action, Action::Deal);
  const QResult c = s.evaluate(GameState{0b011, 1});
  EXPECT_NEAR(c.q_nodeal, 4.716, 1e-3);
  EXPECT_NEAR(c.q_deal, 5.247, 1e-3);
}

TEST(Solver, TerminalState) {
  const QResult q = q_values(spec(OnlineRule{}, CrraUtility{3.0}), GameState{0b010, 2});
  EXPECT_EQ(q.offer, 500.0);
  EXPECT_EQ(q.ce_nodeal, 500.0);
  EXPECT_EQ(q.q_deal, q.q_nodeal);
  EXPECT_EQ(q.offer_rule, OfferRule::Terminal);
}

TEST(Solver, TiesGoToDeal) {
  const QResult q = q_values(spec(PureExpectedValue{}, CrraUtility{0.0}, PrizeLadder({1, 3})),
                             GameState{0b11, 0});
  EXPECT_EQ(q.q_deal, q.q_nodeal);
  EXPECT_EQ(q.action, Action::Deal);
}

TEST(Solver, MultiCaseRound) {
  const PrizeLadder l({1, 2, 4, 8, 16});
  const GameSpec g = spec(PureExpectedValue{}, LogUtility{}, l, RoundSchedule({2}));
  oracle::BruteForce bf{l, {2}, PureExpectedValue{}, LogUtility{}};
  const QResult q = q_values(g, GameState{l.full_mask(), 0});
  EXPECT_NEAR(q.q_nodeal, bf.q(l.full_mask(), 0).second, 1e-12);
  // three left after one round, then the contestant keeps their own case
  const QResult r1 = q_values(g, GameState{0b10101, 1});
  EXPECT_NEAR(r1.q_nodeal, (std::log(1) + std::log(4) + std::log(16)) / 3, 1e-14);
  EXPECT_THROW(q_values(g, GameState{0b1111, 1}), ValidationError);
}

TEST(Solver, BellmanConsistency) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto g = oracle::random_game(rng, 6);
    Solver solver(GameSpec{g.ladder, RoundSchedule(g.opens), g.banker, g.utility});
    const auto pol = solver.policy(GameState{g.ladder.full_mask(), 0});
    for (const auto& [s, q] : pol) {
      if (s.count() == 1) continue;
      const int k = solver.spec().schedule.opens_after(s.round, s.count());
      double sum = 0;
      for (const auto& [c, p] : successor_states(s, k)) {
        const QResult& cq = pol.at(c);
        sum += p * std::max(cq.q_deal, cq.q_nodeal);
      }
      EXPECT_NEAR(q.q_nodeal, sum, 1e-10);
      EXPECT_EQ(q.action, q.q_deal >= q.q_nodeal ? Action::Deal : Action::NoDeal);
    }
  }
}

TEST(Solver, PolicyCoversReachableStates) {
  const auto pol = optimal_policy(spec(OnlineRule{}, LogUtility{}));
  EXPECT_EQ(pol.size(), 1u + 3u + 3u);
}

TEST(Solver, ConditionedCertaintyEquivalentAtHighGamma) {
  const PrizeLadder l({100000, 400000, 1000000});
  const QResult q = q_values(spec(PureExpectedValue{}, CrraUtility{9.0}, l), GameState{0b111, 0});
  const QResult ref =
      q_values(spec(PureExpectedValue{}, CrraUtility{9.0, 100000}, l), GameState{0b111, 0});
  EXPECT_NEAR(q.ce_nodeal, ref.ce_nodeal, 1e-6 * ref.ce_nodeal);
  EXPECT_GT(q.ce_nodeal, 100000);
  EXPECT_LT(q.ce_nodeal, 500000);
}

TEST(Guard, RefusesLargeBoards) {
  std::vector<double> v;
  for (int i = 1; i <= 26; ++i) v.push_back(i);
  const GameSpec g = spec(PureExpectedValue{}, LogUtility{}, PrizeLadder(v));
  EXPECT_THROW(q_values(g, GameState{g.ladder.full_mask(), 0}), GuardError);
  SolverLimits tight;
  tight.max_edges = 8;
  EXPECT_THROW(q_values(spec(PureExpectedValue{}, LogUtility{}), kRoot, tight), GuardError);
  EXPECT_DOUBLE_EQ(estimate_edges(RoundSchedule::one_at_a_time(3), kRoot), 3 + 3 * 2);
}

TEST(Guard, EnvironmentOverride) {
  setenv("DOND_GUARD_EDGES", "123", 1);
  EXPECT_EQ(SolverLimits::from_env().max_edges, 123);
  setenv("DOND_GUARD_EDGES", "lots", 1);
  EXPECT_THROW(SolverLimits::from_env(), ValidationError);
  unsetenv("DOND_GUARD_EDGES");
  EXPECT_EQ(SolverLimits::from_env().max_edges, 5e8);
}

TEST(Series, SuzanneRiskNeutralRowsAreMeans) {
  const Trajectory t = bundled_trajectory("suzanne");
  const BankerModel b = calibrate_multipliers(t);
  const std::vector<double> gammas{0.0, 1.54085};
  const auto rows = action_value_series(b, t, gammas, 6);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].round, 7);
  EXPECT_EQ(rows[0].deal_value, 46000);
  EXPECT_EQ(rows[5].round, 9);
  EXPECT_NEAR(rows[4].continuation_ce, 125000, 1e-9);
  EXPECT_LT(rows[5].continuation_ce, rows[5].deal_value);
  for (const auto& r : rows) EXPECT_TRUE(r.gamma == 0.0 || r.gamma == 1.54085);
}
