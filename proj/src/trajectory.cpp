#include "dond/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dond/errors.hpp"

namespace dond {

void validate_trajectory(const Trajectory& t) {
  if (t.rounds.empty()) throw ValidationError("trajectory has no rounds");
  std::vector<Money> previous;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const int label = static_cast<int>(i) + 1;
    const auto& r = t.rounds[i];
    if (r.remaining.empty())
      throw ValidationError("round has no remaining prizes", label);
    for (Money v : r.remaining)
      if (!std::isfinite(v) || v <= 0.0)
        throw ValidationError("prizes must be finite and strictly positive", label);

    std::vector<Money> sorted = r.remaining;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("duplicate prize in remaining set", label);

    if (i > 0) {
      const bool subset =
          std::includes(previous.begin(), previous.end(), sorted.begin(), sorted.end());
      if (!subset || sorted.size() >= previous.size())
        throw ValidationError(
            "remaining prizes must be a strict subset of the previous round", label);
    }
    if (r.offer && (!std::isfinite(*r.offer) || *r.offer < 0.0))
      throw ValidationError("offer must be finite and nonnegative", label);
    if (r.decision && !r.offer)
      throw ValidationError("a decision needs the offer it answered", label);
    if (r.decision == Action::Deal && i + 1 != t.rounds.size())
      throw ValidationError("a Deal ends the game; later rounds are not allowed", label);
    if (r.decision && sorted.size() < 2)
      throw ValidationError("no decision is possible with a single case left", label);
    previous = std::move(sorted);
  }
  if (!t.board.empty()) {
    std::vector<Money> board = t.board;
    std::sort(board.begin(), board.end());
    std::vector<Money> first = t.rounds.front().remaining;
    std::sort(first.begin(), first.end());
    if (!std::includes(board.begin(), board.end(), first.begin(), first.end()))
      throw ValidationError("first round holds prizes that are not on the board", 1);
  }
}

TrajectoryGame trajectory_game(const Trajectory& t) {
  validate_trajectory(t);
  PrizeLadder ladder = PrizeLadder::from_unsorted(t.rounds.front().remaining);

  std::vector<int> opens;
  for (std::size_t i = 0; i + 1 < t.rounds.size(); ++i)
    opens.push_back(static_cast<int>(t.rounds[i].remaining.size() -
                                     t.rounds[i + 1].remaining.size()));
  for (int left = static_cast<int>(t.rounds.back().remaining.size()); left > 1; --left)
    opens.push_back(1);
  RoundSchedule schedule(std::move(opens));
  schedule.validate_for(ladder.size());

  std::vector<GameState> states;
  states.reserve(t.rounds.size());
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    GameState s{ladder.mask_of(t.rounds[i].remaining), static_cast<int>(i)};
    validate_state(ladder, schedule, s);
    states.push_back(s);
  }
  return {std::move(ladder), std::move(schedule), std::move(states)};
}

}  // namespace dond
