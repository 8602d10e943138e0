#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dond/core_model.hpp"

namespace dond {

struct TrajectoryRound {
  std::vector<Money> remaining;
  std::optional<Money> offer;
  std::optional<Action> decision;
  std::string note;
};

/// One contestant's observed game, one entry per offer point. Rounds are
/// numbered from 1 in everything user-facing.
struct Trajectory {
  std::string contestant;
  std::string currency;
  std::vector<TrajectoryRound> rounds;
  // Full starting board when known; informational only.
  std::vector<Money> board;
};

/// Throws ValidationError (carrying the 1-based round) when prizes are not
/// positive, rounds are not strictly nested, a decision lacks an offer, or
/// a Deal is followed by further play.
void validate_trajectory(const Trajectory& t);

/// The trajectory recast as a game: the first round's prizes form the
/// ladder, the schedule follows the observed shrinkage and then opens one
/// case at a time, and each round maps to its state.
struct TrajectoryGame {
  PrizeLadder ladder;
  RoundSchedule schedule;
  std::vector<GameState> states;
};

/// Requires at least two prizes in the first round.
TrajectoryGame trajectory_game(const Trajectory& t);

}  // namespace dond
