#include "dond/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dond/errors.hpp"

namespace dond {

const char* to_string(Action a) {
  return a == Action::Deal ? "deal" : "no_deal";
}

Action action_from_string(const std::string& s) {
  if (s == "deal") return Action::Deal;
  if (s == "no_deal") return Action::NoDeal;
  throw ValidationError("unknown action '" + s + "' (expected deal|no_deal)");
}

// ---------------------------------------------------------------------------

PrizeLadder::PrizeLadder(std::vector<Money> prizes) : prizes_(std::move(prizes)) {
  if (prizes_.size() < 2)
    throw ValidationError("prize ladder needs at least two prizes");
  if (prizes_.size() > static_cast<std::size_t>(kMaxLadderSize))
    throw ValidationError("prize ladder exceeds 64 prizes");
  for (std::size_t i = 0; i < prizes_.size(); ++i) {
    if (!std::isfinite(prizes_[i]) || prizes_[i] <= 0.0)
      throw ValidationError("prizes must be finite and strictly positive");
    if (i > 0 && !(prizes_[i - 1] < prizes_[i]))
      throw ValidationError("prizes must be strictly ascending");
  }
}

PrizeLadder PrizeLadder::from_unsorted(std::vector<Money> prizes) {
  std::sort(prizes.begin(), prizes.end());
  if (std::adjacent_find(prizes.begin(), prizes.end()) != prizes.end())
    throw ValidationError("duplicate prize on the board");
  return PrizeLadder(std::move(prizes));
}

CaseMask PrizeLadder::full_mask() const noexcept {
  return size() == 64 ? ~CaseMask{0} : (CaseMask{1} << size()) - 1;
}

CaseMask PrizeLadder::mask_of(std::span<const Money> values) const {
  CaseMask mask = 0;
  for (Money v : values) {
    auto it = std::lower_bound(prizes_.begin(), prizes_.end(), v);
    if (it == prizes_.end() || *it != v) {
      std::ostringstream os;
      os << "prize " << v << " is not on the board";
      throw ValidationError(os.str());
    }
    const CaseMask bit = CaseMask{1} << (it - prizes_.begin());
    if (mask & bit) {
      std::ostringstream os;
      os << "prize " << v << " listed twice";
      throw ValidationError(os.str());
    }
    mask |= bit;
  }
  return mask;
}

std::vector<Money> PrizeLadder::values(CaseMask mask) const {
  std::vector<Money> out;
  out.reserve(std::popcount(mask));
  for (std::size_t i = 0; i < size(); ++i)
    if (mask & (CaseMask{1} << i)) out.push_back(prizes_[i]);
  return out;
}

Money PrizeLadder::mean(CaseMask mask) const {
  const auto v = values(mask);
  if (v.empty()) throw ValidationError("mean of an empty prize set");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Money PrizeLadder::largest(CaseMask mask) const {
  if (mask == 0) throw ValidationError("largest of an empty prize set");
  return prizes_[63 - std::countl_zero(mask)];
}

Money PrizeLadder::smallest(CaseMask mask) const {
  if (mask == 0) throw ValidationError("smallest of an empty prize set");
  return prizes_[std::countr_zero(mask)];
}

// ---------------------------------------------------------------------------

RoundSchedule::RoundSchedule(std::vector<int> opens_per_round)
    : opens_(std::move(opens_per_round)) {
  for (int k : opens_)
    if (k < 1) throw ValidationError("each round must open at least one case");
}

RoundSchedule RoundSchedule::one_at_a_time(std::size_t board_size) {
  if (board_size < 2) return RoundSchedule{};
  return RoundSchedule(std::vector<int>(board_size - 1, 1));
}

int RoundSchedule::total_opens() const noexcept {
  return std::accumulate(opens_.begin(), opens_.end(), 0);
}

int RoundSchedule::opens_after(int round, int remaining) const {
  if (round >= 0 && static_cast<std::size_t>(round) < opens_.size())
    return opens_[round];
  return remaining - 1;
}

int RoundSchedule::remaining_at(int round, std::size_t board_size) const {
  int left = static_cast<int>(board_size);
  for (int r = 0; r < round && static_cast<std::size_t>(r) < opens_.size(); ++r)
    left -= opens_[r];
  const int past_end = round - static_cast<int>(opens_.size());
  if (past_end == 1 && left > 1) return 1;
  if (past_end >= 1) return -1;
  return left;
}

int RoundSchedule::round_for_count(int remaining, std::size_t board_size) const {
  int left = static_cast<int>(board_size);
  for (std::size_t r = 0; r <= opens_.size(); ++r) {
    if (left == remaining) return static_cast<int>(r);
    if (r < opens_.size()) left -= opens_[r];
  }
  // Keeping one's own case after the schedule runs out.
  if (remaining == 1 && left > 1) return static_cast<int>(opens_.size()) + 1;
  return -1;
}

void RoundSchedule::validate_for(std::size_t board_size) const {
  if (total_opens() > static_cast<int>(board_size) - 1) {
    std::ostringstream os;
    os << "schedule opens " << total_opens() << " cases but a board of "
       << board_size << " allows at most " << board_size - 1;
    throw ValidationError(os.str());
  }
}

int GameState::count() const noexcept { return std::popcount(remaining); }

void validate_state(const PrizeLadder& ladder, const RoundSchedule& schedule,
                    const GameState& s) {
  if (s.remaining == 0) throw ValidationError("state has no remaining prizes");
  if ((s.remaining & ~ladder.full_mask()) != 0)
    throw ValidationError("state references cases outside the board");
  if (s.round < 0) throw ValidationError("negative round index");
  const int expected = schedule.remaining_at(s.round, ladder.size());
  if (expected < 0) {
    std::ostringstream os;
    os << "round " << s.round << " lies beyond the end of the game";
    throw ValidationError(os.str(), s.round);
  }
  if (s.count() != expected) {
    std::ostringstream os;
    os << "state at round " << s.round << " holds " << s.count()
       << " prizes but the schedule leaves " << expected;
    throw ValidationError(os.str(), s.round);
  }
}

GameState state_for(const PrizeLadder& ladder, const RoundSchedule& schedule,
                    std::span<const Money> remaining) {
  GameState s{ladder.mask_of(remaining), 0};
  if (s.remaining == 0) throw ValidationError("no remaining prizes given");
  s.round = schedule.round_for_count(s.count(), ladder.size());
  if (s.round < 0) {
    std::ostringstream os;
    os << "no offer point of the schedule leaves " << s.count() << " prizes";
    throw ValidationError(os.str());
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

bool near_log(double gamma) { return std::abs(gamma - 1.0) < kLogGammaTolerance; }

Utiles finite_or_throw(Utiles v, const char* what) {
  if (!std::isfinite(v))
    throw NonFiniteError(std::string(what) + " is not finite");
  return v;
}

Utiles exp_power_value(const ExpPowerUtility& u, Money x) {
  const double base = std::pow(u.wealth + x, 1.0 - u.gamma);
  return -std::expm1(-u.alpha * base) / u.alpha;
}

}  // namespace

void validate_utility(const UtilitySpec& u) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CrraUtility>) {
          if (!std::isfinite(f.gamma)) throw ValidationError("CRRA gamma must be finite");
          if (!(f.reference > 0.0) || !std::isfinite(f.reference))
            throw ValidationError("CRRA reference must be positive");
        } else if constexpr (std::is_same_v<T, ExpPowerUtility>) {
          if (!(f.alpha > 0.0) || !std::isfinite(f.alpha))
            throw ValidationError("exp-power alpha must be positive");
          if (!(f.gamma < 1.0))
            throw ValidationError("exp-power gamma must be below 1 for an increasing utility");
          if (!(f.wealth >= 0.0) || !std::isfinite(f.wealth))
            throw ValidationError("exp-power wealth must be nonnegative");
        }
      },
      u);
}

std::string describe(const UtilitySpec& u) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LogUtility>) {
          os << "log";
        } else if constexpr (std::is_same_v<T, CrraUtility>) {
          os << "crra:" << f.gamma;
        } else {
          os << "exppower:" << f.alpha << ',' << f.gamma << ',' << f.wealth;
        }
      },
      u);
  return os.str();
}

Utiles utility_value(const UtilitySpec& u, Money x) {
  return std::visit(
      [x](const auto& f) -> Utiles {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LogUtility>) {
          if (!(x > 0.0)) throw DomainError("log utility needs a positive amount");
          return std::log(x);
        } else if constexpr (std::is_same_v<T, CrraUtility>) {
          if (!(x > 0.0)) throw DomainError("CRRA utility needs a positive amount");
          const double y = x / f.reference;
          const double r = std::log(y);
          if (near_log(f.gamma)) return r;
          const double e = 1.0 - f.gamma;
          // expm1 near the log limit; pow elsewhere keeps integer powers exact.
          const double v = std::abs(e * r) < 1e-3 ? std::expm1(e * r) / e
                                                  : (std::pow(y, e) - 1.0) / e;
          return finite_or_throw(v, "CRRA utility");
        } else {
          if (!(x >= 0.0) || !(f.wealth + x > 0.0))
            throw DomainError("exp-power utility needs x >= 0 and W + x > 0");
          return finite_or_throw(exp_power_value(f, x), "exp-power utility");
        }
      },
      u);
}

Money certainty_equivalent(const UtilitySpec& u, Utiles q) {
  if (!std::isfinite(q)) throw NonFiniteError("utility level is not finite");
  return std::visit(
      [q](const auto& f) -> Money {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LogUtility>) {
          return finite_or_throw(std::exp(q), "certainty equivalent");
        } else if constexpr (std::is_same_v<T, CrraUtility>) {
          if (near_log(f.gamma))
            return finite_or_throw(f.reference * std::exp(q), "certainty equivalent");
          const double e = 1.0 - f.gamma;
          if (!(e * q + 1.0 > 0.0)) {
            std::ostringstream os;
            os << "utility " << q << " is outside the range of CRRA(" << f.gamma << ")";
            throw RangeError(os.str());
          }
          return finite_or_throw(f.reference * std::exp(std::log1p(e * q) / e),
                                 "certainty equivalent");
        } else {
          // Guarded bisection on the increasing utility; runs to full double
          // resolution, well inside the 1e-6 money tolerance.
          const Utiles floor = exp_power_value(f, 0.0);
          if (q < floor || q >= 1.0 / f.alpha)
            throw RangeError("utility level is outside the exp-power range");
          Money lo = 0.0;
          Money hi = 1.0;
          int guard = 0;
          while (exp_power_value(f, hi) < q) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 1100 || !std::isfinite(hi))
              throw RangeError("exp-power inverse failed to bracket");
          }
          for (int it = 0; it < 2000; ++it) {
            const Money mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (exp_power_value(f, mid) < q) lo = mid; else hi = mid;
          }
          return 0.5 * (lo + hi);
        }
      },
      u);
}

std::vector<std::pair<GameState, double>> successor_states(const GameState& s,
                                                           int k) {
  const int n = s.count();
  if (k < 1 || k >= n) {
    std::ostringstream os;
    os << "cannot open " << k << " of " << n
       << " cases; the contestant's own case stays closed";
    throw ValidationError(os.str(), s.round);
  }
  std::vector<CaseMask> bits;
  bits.reserve(n);
  for (CaseMask m = s.remaining; m != 0; m &= m - 1) bits.push_back(m & -m);

  std::vector<CaseMask> next;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    CaseMask removed = 0;
    for (int i : idx) removed |= bits[i];
    next.push_back(s.remaining & ~removed);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::sort(next.begin(), next.end());

  const double p = 1.0 / static_cast<double>(next.size());
  std::vector<std::pair<GameState, double>> out;
  out.reserve(next.size());
  for (CaseMask m : next) out.push_back({GameState{m, s.round + 1}, p});
  return out;
}

}  // namespace dond
