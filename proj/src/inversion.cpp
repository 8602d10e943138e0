#include "dond/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dond/errors.hpp"

namespace dond {

namespace {

Action opposite(Action a) { return a == Action::Deal ? Action::NoDeal : Action::Deal; }

// CRRA normalised at the state's smallest prize for gamma < 1 and at its
// largest otherwise, so the dominant terms of both Q-values stay O(1) or
// larger instead of collapsing onto the constant 1/(gamma-1).
UtilitySpec conditioned_crra(const PrizeLadder& ladder, const GameState& s, double gamma) {
  const Money ref = gamma < 1.0 ? ladder.smallest(s.remaining) : ladder.largest(s.remaining);
  return CrraUtility{gamma, ref};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Action GammaPolicy::action_at(double gamma) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), gamma);
  return actions[it - breakpoints.begin()];
}

std::vector<Interval> GammaPolicy::intervals() const {
  std::vector<Interval> out;
  double lo = range.lo;
  for (double b : breakpoints) {
    out.push_back({lo, b});
    lo = b;
  }
  out.push_back({lo, range.hi});
  return out;
}

std::vector<Interval> GammaPolicy::intervals_for(Action a) const {
  std::vector<Interval> out;
  const auto all = intervals();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (actions[i] == a) out.push_back(all[i]);
  return out;
}

std::vector<double> GammaPolicy::all_breakpoints() const {
  std::vector<double> out = breakpoints;
  out.insert(out.end(), downstream.begin(), downstream.end());
  std::sort(out.begin(), out.end());
  return out;
}

double decision_advantage(const PrizeLadder& ladder, const RoundSchedule& schedule,
                          const BankerModel& banker, const GameState& s, double gamma,
                          const SolverLimits& limits) {
  Solver solver(GameSpec{ladder, schedule, banker, conditioned_crra(ladder, s, gamma)},
                limits);
  return solver.advantage(s);
}

// ---------------------------------------------------------------------------

ThresholdAnalyzer::ThresholdAnalyzer(PrizeLadder ladder, RoundSchedule schedule,
                                     BankerModel banker, ThresholdOptions options)
    : ladder_(std::move(ladder)),
      schedule_(std::move(schedule)),
      banker_(std::move(banker)),
      options_(options) {
  if (!(options_.range.lo < options_.range.hi) || !std::isfinite(options_.range.lo) ||
      !std::isfinite(options_.range.hi))
    throw ValidationError("gamma range must be a finite interval lo < hi");
  if (options_.grid_points < 2) throw ValidationError("grid needs at least two points");
  schedule_.validate_for(ladder_.size());
  validate_banker(banker_);
}

ThresholdAnalyzer::Probe ThresholdAnalyzer::probe(const GameState& s, double gamma) {
  Solver solver(GameSpec{ladder_, schedule_, banker_, conditioned_crra(ladder_, s, gamma)},
                options_.limits);
  const QResult q = solver.evaluate(s);
  const double adv = q.q_nodeal - q.q_deal;
  if (!std::isfinite(adv)) {
    std::ostringstream os;
    os << "Q-value difference is not finite at gamma = " << gamma;
    throw NonFiniteError(os.str());
  }
  return {adv, std::max({std::abs(q.q_deal), std::abs(q.q_nodeal), 1e-300})};
}

double ThresholdAnalyzer::refine(const GameState& s, double a, double b, bool nodeal_at_a) {
  // Offers at the expectation tie exactly at risk neutrality; report that
  // crossing as 0 rather than wherever rounding noise lands.
  if (a <= 0.0 && 0.0 <= b) {
    const Probe z = probe(s, 0.0);
    if (std::abs(z.advantage) <= 1e-12 * z.scale) return 0.0;
  }
  while (b - a > options_.tolerance) {
    const double m = 0.5 * (a + b);
    if ((probe(s, m).advantage > 0.0) == nodeal_at_a) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

const GammaPolicy& ThresholdAnalyzer::policy(const GameState& s) {
  if (auto it = memo_.find(s); it != memo_.end()) return it->second;
  validate_state(ladder_, schedule_, s);
  check_guard(GameSpec{ladder_, schedule_, banker_, LogUtility{}}, s, options_.limits);
  GammaPolicy p = compute(s);
  return memo_.emplace(s, std::move(p)).first->second;
}

GammaPolicy ThresholdAnalyzer::compute(const GameState& s) {
  const GammaRange range = options_.range;
  GammaPolicy p;
  p.range = range;
  if (s.count() == 1) {
    p.actions = {Action::Deal};
    return p;
  }

  // Downstream flips first: within each gap between them the No-Deal value
  // has a fixed functional form.
  std::vector<double> down;
  const int k = schedule_.opens_after(s.round, s.count());
  for (const auto& [child, prob] : successor_states(s, k)) {
    const GammaPolicy& cp = policy(child);
    down.insert(down.end(), cp.breakpoints.begin(), cp.breakpoints.end());
    down.insert(down.end(), cp.downstream.begin(), cp.downstream.end());
  }
  std::sort(down.begin(), down.end());
  for (double d : down) {
    if (!(range.lo < d && d < range.hi)) continue;
    if (p.downstream.empty() || d - p.downstream.back() > options_.merge_tolerance)
      p.downstream.push_back(d);
  }

  std::vector<double> nodes{range.lo};
  nodes.insert(nodes.end(), p.downstream.begin(), p.downstream.end());
  nodes.push_back(range.hi);

  std::vector<double> grid;
  const int steps = options_.grid_points - 1;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i], b = nodes[i + 1];
    for (int j = (i == 0 ? 0 : 1); j <= steps; ++j)
      grid.push_back(j == steps ? b : a + (b - a) * j / steps);
  }

  std::vector<bool> nodeal(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nodeal[i] = probe(s, grid[i]).advantage > 0.0;

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (nodeal[i] != nodeal[i + 1]) roots.push_back(refine(s, grid[i], grid[i + 1], nodeal[i]));

  p.actions.push_back(nodeal.front() ? Action::NoDeal : Action::Deal);
  for (double r : roots) {
    if (!p.breakpoints.empty() && r - p.breakpoints.back() <= options_.merge_tolerance) {
      // Two flips closer than the tolerance cancel out.
      p.breakpoints.pop_back();
      p.actions.pop_back();
      continue;
    }
    p.breakpoints.push_back(r);
    p.actions.push_back(opposite(p.actions.back()));
  }
  return p;
}

GammaPolicy decision_thresholds(const PrizeLadder& ladder, const RoundSchedule& schedule,
                                const BankerModel& banker, const GameState& s,
                                const ThresholdOptions& options) {
  ThresholdAnalyzer analyzer(ladder, schedule, banker, options);
  return analyzer.policy(s);
}

// ---------------------------------------------------------------------------

const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::None: return "none";
    case ConstraintKind::Upper: return "upper";
    case ConstraintKind::Lower: return "lower";
    case ConstraintKind::Union: return "union";
    case ConstraintKind::Infeasible: return "infeasible";
  }
  return "unknown";
}

int default_window_start(const Trajectory& t, int window_prizes) {
  for (std::size_t i = 0; i < t.rounds.size(); ++i)
    if (static_cast<int>(t.rounds[i].remaining.size()) <= window_prizes)
      return static_cast<int>(i);
  return static_cast<int>(t.rounds.size()) - 1;
}

namespace {

std::vector<Interval> intersect(const std::vector<Interval>& a, const std::vector<Interval>& b,
                                double min_width) {
  std::vector<Interval> out;
  for (const auto& x : a)
    for (const auto& y : b) {
      const Interval z{std::max(x.lo, y.lo), std::min(x.hi, y.hi)};
      if (z.hi - z.lo > min_width) out.push_back(z);
    }
  std::sort(out.begin(), out.end(), [](const Interval& l, const Interval& r) { return l.lo < r.lo; });
  return out;
}

}  // namespace

BoundsReport infer_gamma_bounds(const Trajectory& trajectory, const BankerModel& banker,
                                const InversionOptions& options) {
  validate_trajectory(trajectory);
  const auto& topts = options.thresholds;
  const double min_width = topts.merge_tolerance;
  const std::vector<Interval> positive{{0.0, topts.range.hi}};

  BoundsReport report;
  report.range = topts.range;
  report.intersection = positive;
  if (!(topts.range.hi > 0.0))
    throw ValidationError("gamma range must extend above zero");

  const int start = options.from_round.value_or(
      default_window_start(trajectory, options.window_prizes));
  const int rounds = static_cast<int>(trajectory.rounds.size());
  if (start < 0 || start >= rounds)
    throw ValidationError("analysis start round is outside the trajectory");
  report.first_round = start + 1;
  if (trajectory.rounds.front().remaining.size() < 2) return report;

  const TrajectoryGame game = trajectory_game(trajectory);
  ThresholdAnalyzer analyzer(game.ladder, game.schedule, banker, topts);

  for (int r = start; r < rounds; ++r) {
    const auto& obs = trajectory.rounds[r];
    if (!obs.decision) continue;
    RoundBound rb;
    rb.round = r + 1;
    rb.observed = *obs.decision;
    rb.policy = analyzer.policy(game.states[r]);
    rb.feasible = intersect(rb.policy.intervals_for(rb.observed), positive, min_width);

    if (rb.observed == Action::Deal) report.observed_deal = true;
    if (rb.feasible.empty()) {
      rb.kind = ConstraintKind::Infeasible;
      rb.risk_seeking = rb.observed == Action::NoDeal;
      report.flagged_rounds.push_back(rb.round);
    } else if (rb.feasible.size() == 1) {
      const Interval& f = rb.feasible.front();
      const bool from_zero = f.lo <= min_width;
      const bool to_top = f.hi >= topts.range.hi - min_width;
      if (from_zero && to_top) {
        rb.kind = ConstraintKind::None;
      } else if (from_zero) {
        rb.kind = ConstraintKind::Upper;
        rb.bound = f.hi;
      } else if (to_top) {
        rb.kind = ConstraintKind::Lower;
        rb.bound = f.lo;
      } else {
        rb.kind = ConstraintKind::Union;
      }
    } else {
      rb.kind = ConstraintKind::Union;
    }
    if (rb.kind != ConstraintKind::Infeasible)
      report.intersection = intersect(report.intersection, rb.feasible, min_width);
    report.per_round.push_back(std::move(rb));
  }
  report.infeasible = report.intersection.empty();
  return report;
}

std::string summarize(const BoundsReport& report) {
  std::ostringstream os;
  const double top = report.range.hi;
  if (report.infeasible) {
    os << "no gamma > 0 is consistent with the observed choices";
  } else if (report.intersection.size() == 1) {
    const Interval& i = report.intersection.front();
    const bool from_zero = i.lo <= 0.0;
    const bool to_top = i.hi >= top;
    if (from_zero && to_top)
      os << "no constraint on gamma in (0, " << fmt(top) << ")";
    else if (from_zero)
      os << "gamma < " << fmt(i.hi);
    else if (to_top)
      os << "gamma > " << fmt(i.lo);
    else
      os << fmt(i.lo) << " < gamma < " << fmt(i.hi);
  } else {
    for (std::size_t k = 0; k < report.intersection.size(); ++k)
      os << (k ? " or " : "") << fmt(report.intersection[k].lo) << " < gamma < "
         << fmt(report.intersection[k].hi);
  }
  for (int r : report.flagged_rounds) os << "; round " << r << " infeasible for gamma>0";
  return os.str();
}

// ---------------------------------------------------------------------------

Money enjoyment_benefit(Money offer, std::span<const Money> prizes, double gamma,
                        const BenefitOptions& options) {
  if (!(offer > 0.0) || !std::isfinite(offer))
    throw ValidationError("offer must be positive");
  if (prizes.empty()) throw ValidationError("benefit needs at least one prize");
  for (Money p : prizes)
    if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("prizes must be positive");
  if (!std::isfinite(gamma)) throw ValidationError("gamma must be finite");

  // The condition is affine invariant; measuring money in units of the offer
  // keeps it resolvable at large gamma.
  const UtilitySpec u = CrraUtility{gamma, offer};
  const Utiles target = utility_value(u, offer);
  auto surplus = [&](Money b) {
    double sum = 0.0;
    for (Money p : prizes) sum += utility_value(u, p + b);
    return sum / static_cast<double>(prizes.size()) - target;
  };

  if (surplus(0.0) >= 0.0) return 0.0;
  const Money cap = options.cap_factor * *std::max_element(prizes.begin(), prizes.end());
  if (surplus(cap) < 0.0) {
    std::ostringstream os;
    os << "no enjoyment benefit up to " << cap << " justifies declining the offer";
    throw UnboundedError(os.str());
  }
  Money lo = 0.0, hi = cap;
  while (hi - lo > options.tolerance) {
    const Money mid = 0.5 * (lo + hi);
    if (surplus(mid) >= 0.0) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace dond
