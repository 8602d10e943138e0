#pragma once

#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "dond/banker.hpp"
#include "dond/core_model.hpp"
#include "dond/trajectory.hpp"

namespace dond {

struct GameSpec {
  PrizeLadder ladder;
  RoundSchedule schedule;
  BankerModel banker;
  UtilitySpec utility;
};

/// Refuse solves whose root holds more than `max_prizes` cases or whose
/// reachable transition count is estimated above `max_edges`.
struct SolverLimits {
  int max_prizes = 22;
  double max_edges = 5e8;

  /// Defaults, with the edge budget overridden by DOND_GUARD_EDGES if set.
  static SolverLimits from_env();
};

/// Upper bound on the transitions explored when solving from `root`.
double estimate_edges(const RoundSchedule& schedule, const GameState& root);

void check_guard(const GameSpec& spec, const GameState& root, const SolverLimits& limits);

struct QResult {
  Utiles q_deal = 0.0;
  Utiles q_nodeal = 0.0;
  Money offer = 0.0;
  Money ce_nodeal = 0.0;
  Action action = Action::Deal;
  OfferRule offer_rule = OfferRule::ExpectedValue;
};

/// Exact backward induction over subset states with a private memo table.
/// Ties between the two actions resolve to Deal. A solver instance is not
/// shareable across threads; independent instances are.
class Solver {
 public:
  explicit Solver(GameSpec spec, SolverLimits limits = {});

  const GameSpec& spec() const noexcept { return spec_; }

  /// Q-values at a reachable state. Validates the state and the guard.
  QResult evaluate(const GameState& s);

  /// q_nodeal - q_deal at `s`; positive means No Deal is strictly better.
  double advantage(const GameState& s);

  /// Every state reachable from `root` (inclusive) with its Q-values.
  std::map<GameState, QResult> policy(const GameState& root);

  std::size_t memo_size() const noexcept { return memo_.size(); }

 private:
  struct Entry {
    Utiles q_deal;
    Utiles q_nodeal;
    Offer offer;
  };
  struct KeyHash {
    std::size_t operator()(const GameState& s) const noexcept {
      return static_cast<std::size_t>(s.remaining * 0x9E3779B97F4A7C15ULL) ^
             static_cast<std::size_t>(s.round);
    }
  };

  void prepare(const GameState& root);
  const Entry& solve(const GameState& s);
  Money continuation_ce(const GameState& s, const Entry& e);
  QResult to_result(const GameState& s, const Entry& e);

  GameSpec spec_;
  SolverLimits limits_;
  std::unordered_map<GameState, Entry, KeyHash> memo_;
  std::map<Money, std::unique_ptr<Solver>> rescaled_;
};

QResult q_values(const GameSpec& spec, const GameState& s, const SolverLimits& limits = {});

/// Policy over every state reachable from the full board at round 0.
std::map<GameState, QResult> optimal_policy(const GameSpec& spec,
                                            const SolverLimits& limits = {});

struct SeriesRow {
  int round = 0;  // 1-based trajectory round
  double gamma = 0.0;
  Money deal_value = 0.0;
  Money continuation_ce = 0.0;
};

/// Offer and No-Deal certainty equivalent at each observed round (from the
/// 0-based `from_round` on) under CRRA utility for each gamma. Rows are
/// ordered by round, then by gamma in the order given.
std::vector<SeriesRow> action_value_series(const BankerModel& banker,
                                           const Trajectory& trajectory,
                                           std::span<const double> gammas,
                                           int from_round = 0,
                                           const SolverLimits& limits = {});

}  // namespace dond
