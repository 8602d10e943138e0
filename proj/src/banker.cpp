#include "dond/banker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dond/errors.hpp"

namespace dond {

const char* to_string(Extrapolation e) {
  return e == Extrapolation::HoldLast ? "hold_last" : "linear_trend";
}

const char* to_string(OfferRule r) {
  switch (r) {
    case OfferRule::ExpectedValue: return "expected_value";
    case OfferRule::Multiplier: return "multiplier";
    case OfferRule::OnlineThree: return "online_3";
    case OfferRule::OnlineTwo: return "online_2";
    case OfferRule::Terminal: return "terminal";
  }
  return "unknown";
}

double MultiplierSchedule::multiplier_at(int round) const {
  if (multipliers.empty())
    throw ValidationError("multiplier schedule is empty");
  if (round < 0) throw ValidationError("negative round index");
  const auto n = static_cast<int>(multipliers.size());
  if (round < n) return multipliers[round];
  if (extrapolation == Extrapolation::HoldLast || n == 1) return multipliers.back();

  // Least-squares line through (r, m_r), clamped at zero.
  double mean_r = 0.0, mean_m = 0.0;
  for (int r = 0; r < n; ++r) {
    mean_r += r;
    mean_m += multipliers[r];
  }
  mean_r /= n;
  mean_m /= n;
  double sxy = 0.0, sxx = 0.0;
  for (int r = 0; r < n; ++r) {
    sxy += (r - mean_r) * (multipliers[r] - mean_m);
    sxx += (r - mean_r) * (r - mean_r);
  }
  const double slope = sxy / sxx;
  return std::max(0.0, mean_m + slope * (round - mean_r));
}

void validate_banker(const BankerModel& model) {
  std::visit(
      [](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, MultiplierSchedule>) {
          if (b.multipliers.empty()) throw ValidationError("multiplier schedule is empty");
          for (double m : b.multipliers)
            if (!std::isfinite(m) || m < 0.0)
              throw ValidationError("multipliers must be finite and nonnegative");
        } else if constexpr (std::is_same_v<T, OnlineRule>) {
          for (double c : {b.coeff3_big, b.coeff3_small, b.coeff2_big, b.coeff2_small})
            if (!std::isfinite(c) || c < 0.0)
              throw ValidationError("online coefficients must be finite and nonnegative");
          if (b.fallback) validate_banker(*b.fallback);
        }
      },
      model);
}

std::string describe(const BankerModel& model) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PureExpectedValue>) {
          os << "ev";
        } else if constexpr (std::is_same_v<T, MultiplierSchedule>) {
          os << "multipliers:";
          for (std::size_t i = 0; i < b.multipliers.size(); ++i)
            os << (i ? "," : "") << b.multipliers[i];
        } else {
          os << "online";
        }
      },
      model);
  return os.str();
}

Offer banker_offer_traced(const BankerModel& model, const GameState& s,
                          const PrizeLadder& ladder) {
  if (s.remaining == 0) throw ValidationError("banker offer on an empty state");
  return std::visit(
      [&](const auto& b) -> Offer {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, PureExpectedValue>) {
          return {ladder.mean(s.remaining), OfferRule::ExpectedValue};
        } else if constexpr (std::is_same_v<T, MultiplierSchedule>) {
          return {b.multiplier_at(s.round) * ladder.mean(s.remaining),
                  OfferRule::Multiplier};
        } else {
          const int n = s.count();
          if (n == 3)
            return {b.coeff3_big * ladder.largest(s.remaining) +
                        b.coeff3_small * ladder.smallest(s.remaining),
                    OfferRule::OnlineThree};
          if (n == 2)
            return {b.coeff2_big * ladder.largest(s.remaining) +
                        b.coeff2_small * ladder.smallest(s.remaining),
                    OfferRule::OnlineTwo};
          if (b.fallback) return banker_offer_traced(*b.fallback, s, ladder);
          return {ladder.mean(s.remaining), OfferRule::ExpectedValue};
        }
      },
      model);
}

Money banker_offer(const BankerModel& model, const GameState& s,
                   const PrizeLadder& ladder) {
  return banker_offer_traced(model, s, ladder).amount;
}

double implied_multiplier(Money offer, const GameState& s, const PrizeLadder& ladder) {
  if (!(offer >= 0.0)) throw ValidationError("offer must be nonnegative");
  return offer / ladder.mean(s.remaining);
}

}  // namespace dond
