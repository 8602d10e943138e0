#include "dond/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <sstream>
#include <string>

#include "dond/errors.hpp"

namespace dond {

SolverLimits SolverLimits::from_env() {
  SolverLimits limits;
  if (const char* env = std::getenv("DOND_GUARD_EDGES"); env && *env) {
    try {
      std::size_t used = 0;
      const double v = std::stod(env, &used);
      if (used != std::string(env).size() || !(v > 0.0)) throw std::invalid_argument(env);
      limits.max_edges = v;
    } catch (const std::exception&) {
      throw ValidationError(std::string("DOND_GUARD_EDGES is not a positive number: ") + env);
    }
  }
  return limits;
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double estimate_edges(const RoundSchedule& schedule, const GameState& root) {
  const int top = root.count();
  int left = top;
  double edges = 0.0;
  for (int round = root.round; left > 1; ++round) {
    const int k = schedule.opens_after(round, left);
    edges += binomial(top, left) * binomial(left, k);
    left -= k;
  }
  return edges;
}

void check_guard(const GameSpec& spec, const GameState& root, const SolverLimits& limits) {
  if (root.count() > limits.max_prizes) {
    std::ostringstream os;
    os << "state holds " << root.count() << " prizes; the solver budget allows "
       << limits.max_prizes;
    throw GuardError(os.str());
  }
  const double edges = estimate_edges(spec.schedule, root);
  if (edges > limits.max_edges) {
    std::ostringstream os;
    os << "solve needs about " << edges << " transitions; the budget is "
       << limits.max_edges << " (raise DOND_GUARD_EDGES to allow it)";
    throw GuardError(os.str());
  }
}

Solver::Solver(GameSpec spec, SolverLimits limits)
    : spec_(std::move(spec)), limits_(limits) {
  spec_.schedule.validate_for(spec_.ladder.size());
  validate_banker(spec_.banker);
  validate_utility(spec_.utility);
}

void Solver::prepare(const GameState& root) {
  validate_state(spec_.ladder, spec_.schedule, root);
  check_guard(spec_, root, limits_);
}

const Solver::Entry& Solver::solve(const GameState& s) {
  if (auto it = memo_.find(s); it != memo_.end()) return it->second;

  Entry e{};
  const int n = s.count();
  if (n == 1) {
    const Money prize = spec_.ladder.smallest(s.remaining);
    e.offer = {prize, OfferRule::Terminal};
    e.q_deal = e.q_nodeal = utility_value(spec_.utility, prize);
  } else {
    e.offer = banker_offer_traced(spec_.banker, s, spec_.ladder);
    e.q_deal = utility_value(spec_.utility, e.offer.amount);
    const int k = spec_.schedule.opens_after(s.round, n);
    double sum = 0.0;
    for (const auto& [child, p] : successor_states(s, k)) {
      const Entry& c = solve(child);
      sum += p * std::max(c.q_deal, c.q_nodeal);
    }
    e.q_nodeal = sum;
  }
  return memo_.emplace(s, e).first->second;
}

Money Solver::continuation_ce(const GameState& s, const Entry& e) {
  if (e.offer.rule == OfferRule::Terminal) return e.offer.amount;
  const auto* crra = std::get_if<CrraUtility>(&spec_.utility);
  if (crra && crra->gamma > 1.0) {
    // Large gamma drives u toward its supremum and 1 + (1-gamma) q cancels;
    // re-solve with the state's smallest prize as reference instead.
    const Money low = spec_.ladder.smallest(s.remaining);
    if (std::pow(low / crra->reference, 1.0 - crra->gamma) < 1e-3) {
      auto& sub = rescaled_[low];
      if (!sub) {
        GameSpec spec = spec_;
        spec.utility = CrraUtility{crra->gamma, low};
        sub = std::make_unique<Solver>(std::move(spec), limits_);
      }
      return certainty_equivalent(sub->spec_.utility, sub->solve(s).q_nodeal);
    }
  }
  return certainty_equivalent(spec_.utility, e.q_nodeal);
}

QResult Solver::to_result(const GameState& s, const Entry& e) {
  QResult r;
  r.q_deal = e.q_deal;
  r.q_nodeal = e.q_nodeal;
  r.offer = e.offer.amount;
  r.offer_rule = e.offer.rule;
  r.action = e.q_deal >= e.q_nodeal ? Action::Deal : Action::NoDeal;
  r.ce_nodeal = continuation_ce(s, e);
  return r;
}

QResult Solver::evaluate(const GameState& s) {
  prepare(s);
  return to_result(s, solve(s));
}

double Solver::advantage(const GameState& s) {
  prepare(s);
  const Entry& e = solve(s);
  return e.q_nodeal - e.q_deal;
}

std::map<GameState, QResult> Solver::policy(const GameState& root) {
  prepare(root);
  solve(root);
  std::map<GameState, QResult> out;
  std::deque<GameState> queue{root};
  while (!queue.empty()) {
    const GameState s = queue.front();
    queue.pop_front();
    if (out.contains(s)) continue;
    out.emplace(s, to_result(s, memo_.at(s)));
    if (s.count() > 1) {
      const int k = spec_.schedule.opens_after(s.round, s.count());
      for (const auto& [child, p] : successor_states(s, k))
        if (!out.contains(child)) queue.push_back(child);
    }
  }
  return out;
}

QResult q_values(const GameSpec& spec, const GameState& s, const SolverLimits& limits) {
  Solver solver(spec, limits);
  return solver.evaluate(s);
}

std::map<GameState, QResult> optimal_policy(const GameSpec& spec,
                                            const SolverLimits& limits) {
  Solver solver(spec, limits);
  return solver.policy(GameState{spec.ladder.full_mask(), 0});
}

std::vector<SeriesRow> action_value_series(const BankerModel& banker,
                                           const Trajectory& trajectory,
                                           std::span<const double> gammas,
                                           int from_round,
                                           const SolverLimits& limits) {
  const TrajectoryGame game = trajectory_game(trajectory);
  const int rounds = static_cast<int>(game.states.size());
  if (from_round < 0 || from_round >= rounds)
    throw ValidationError("series start round is outside the trajectory");

  std::vector<std::vector<SeriesRow>> by_gamma;
  for (double gamma : gammas) {
    Solver solver(GameSpec{game.ladder, game.schedule, banker, CrraUtility{gamma}}, limits);
    auto& rows = by_gamma.emplace_back();
    for (int r = from_round; r < rounds; ++r) {
      const QResult q = solver.evaluate(game.states[r]);
      rows.push_back({r + 1, gamma, q.offer, q.ce_nodeal});
    }
  }
  std::vector<SeriesRow> out;
  for (int i = 0; i < rounds - from_round; ++i)
    for (const auto& rows : by_gamma) out.push_back(rows[i]);
  return out;
}

}  // namespace dond
