#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dond/core_model.hpp"

namespace dond {

/// Offer equals the mean of the remaining prizes.
struct PureExpectedValue {};

enum class Extrapolation { HoldLast, LinearTrend };

const char* to_string(Extrapolation e);

/// Offer = m[round] * mean. Rounds past the observed multipliers are filled
/// by the extrapolation rule.
struct MultiplierSchedule {
  std::vector<double> multipliers;
  Extrapolation extrapolation = Extrapolation::HoldLast;

  double multiplier_at(int round) const;
};

struct OnlineRule;

using BankerModel = std::variant<PureExpectedValue, MultiplierSchedule, OnlineRule>;

/// Offer formula of the web version of the game: a weighted sum of the
/// largest and smallest prize with two or three prizes left. Any other board
/// size defers to the fallback (expected value when unset).
struct OnlineRule {
  double coeff3_big = 0.305;
  double coeff3_small = 0.5;
  double coeff2_big = 0.355;
  double coeff2_small = 0.5;
  std::shared_ptr<const BankerModel> fallback;
};

/// Which branch of a banker model produced an offer.
enum class OfferRule { ExpectedValue, Multiplier, OnlineThree, OnlineTwo, Terminal };

const char* to_string(OfferRule r);

struct Offer {
  Money amount = 0.0;
  OfferRule rule = OfferRule::ExpectedValue;
};

void validate_banker(const BankerModel& model);
std::string describe(const BankerModel& model);

Offer banker_offer_traced(const BankerModel& model, const GameState& s,
                          const PrizeLadder& ladder);

Money banker_offer(const BankerModel& model, const GameState& s,
                   const PrizeLadder& ladder);

/// Observed offer as a fraction of the mean of the remaining prizes.
double implied_multiplier(Money offer, const GameState& s, const PrizeLadder& ladder);

}  // namespace dond
