#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dond {

using Money = double;
using Utiles = double;

// Set of ladder positions still in play, bit i <=> ladder[i].
using CaseMask = std::uint64_t;

inline constexpr int kMaxLadderSize = 64;

enum class Action { Deal = 0, NoDeal = 1 };

const char* to_string(Action a);
Action action_from_string(const std::string& s);

/// Ordered board of distinct, strictly positive prizes.
class PrizeLadder {
 public:
  /// Requires strictly ascending positive values, at least two of them.
  explicit PrizeLadder(std::vector<Money> prizes);

  /// Sorts first; duplicates are still rejected.
  static PrizeLadder from_unsorted(std::vector<Money> prizes);

  std::size_t size() const noexcept { return prizes_.size(); }
  Money operator[](std::size_t i) const { return prizes_[i]; }
  std::span<const Money> prizes() const noexcept { return prizes_; }
  Money min() const noexcept { return prizes_.front(); }
  Money max() const noexcept { return prizes_.back(); }
  CaseMask full_mask() const noexcept;

  /// Mask of the positions holding `values`. Throws ValidationError if a
  /// value is not on the board or is listed twice.
  CaseMask mask_of(std::span<const Money> values) const;

  std::vector<Money> values(CaseMask mask) const;
  Money mean(CaseMask mask) const;
  Money largest(CaseMask mask) const;
  Money smallest(CaseMask mask) const;

 private:
  std::vector<Money> prizes_;
};

/// Number of cases opened after each offer point. Offer point r is followed
/// by opens_per_round[r] openings; past the end of the schedule a No Deal
/// means keeping the contestant's own case.
class RoundSchedule {
 public:
  RoundSchedule() = default;
  explicit RoundSchedule(std::vector<int> opens_per_round);

  /// One case per round until a single case remains.
  static RoundSchedule one_at_a_time(std::size_t board_size);

  std::span<const int> opens_per_round() const noexcept { return opens_; }
  std::size_t rounds() const noexcept { return opens_.size(); }
  int total_opens() const noexcept;

  /// Cases opened after a No Deal at `round` with `remaining` cases left.
  int opens_after(int round, int remaining) const;

  /// Cases left at offer point `round` on a board of `board_size` cases.
  int remaining_at(int round, std::size_t board_size) const;

  /// Offer point at which `remaining` cases are left, or -1.
  int round_for_count(int remaining, std::size_t board_size) const;

  /// Throws ValidationError if the schedule cannot be played on the board.
  void validate_for(std::size_t board_size) const;

 private:
  std::vector<int> opens_;
};

struct GameState {
  CaseMask remaining = 0;
  int round = 0;

  int count() const noexcept;
  friend bool operator==(const GameState&, const GameState&) = default;
  friend auto operator<=>(const GameState& a, const GameState& b) {
    if (auto c = a.round <=> b.round; c != 0) return c;
    return a.remaining <=> b.remaining;
  }
};

/// Throws ValidationError unless `s` is a nonempty subset of the ladder with
/// the case count the schedule prescribes at `s.round`.
void validate_state(const PrizeLadder& ladder, const RoundSchedule& schedule,
                    const GameState& s);

/// Builds the state holding `remaining`, inferring the round from its size.
GameState state_for(const PrizeLadder& ladder, const RoundSchedule& schedule,
                    std::span<const Money> remaining);

// ---------------------------------------------------------------------------
// Utility families

struct LogUtility {};

/// u(x) = ((x/reference)^(1-gamma) - 1) / (1-gamma). reference = 1 is the
/// textbook form; any other positive reference is a positive affine
/// transform of it and orders lotteries identically.
struct CrraUtility {
  double gamma = 0.0;
  Money reference = 1.0;
};

/// u(x) = (1 - exp(-alpha (W + x)^(1-gamma))) / alpha, with gamma < 1.
struct ExpPowerUtility {
  double alpha = 1.0;
  double gamma = 0.0;
  Money wealth = 0.0;
};

using UtilitySpec = std::variant<LogUtility, CrraUtility, ExpPowerUtility>;

inline constexpr double kLogGammaTolerance = 1e-9;

/// Throws ValidationError for inadmissible parameters.
void validate_utility(const UtilitySpec& u);
std::string describe(const UtilitySpec& u);

Utiles utility_value(const UtilitySpec& u, Money x);

/// Money amount whose utility equals q.
Money certainty_equivalent(const UtilitySpec& u, Utiles q);

/// All states reachable by opening k of the cases in `s`, in ascending mask
/// order, each with probability 1 / C(|s|, k). The round advances by one.
std::vector<std::pair<GameState, double>> successor_states(const GameState& s,
                                                           int k);

}  // namespace dond
