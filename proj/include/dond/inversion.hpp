#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dond/banker.hpp"
#include "dond/core_model.hpp"
#include "dond/solver.hpp"
#include "dond/trajectory.hpp"

namespace dond {

/// Open interval of risk-aversion coefficients.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double g) const noexcept { return lo < g && g < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct GammaRange {
  double lo = -5.0;
  double hi = 20.0;
};

/// Optimal action at one state as a piecewise-constant function of the CRRA
/// coefficient. `breakpoints` are where this state's action flips;
/// `downstream` collects the flips of every reachable later state, which
/// change the shape of the No-Deal value without flipping this state.
struct GammaPolicy {
  GammaRange range;
  std::vector<double> breakpoints;
  std::vector<Action> actions;  // breakpoints.size() + 1 entries
  std::vector<double> downstream;

  Action action_at(double gamma) const;
  std::vector<Interval> intervals() const;
  std::vector<Interval> intervals_for(Action a) const;
  /// Sorted union of breakpoints and downstream.
  std::vector<double> all_breakpoints() const;
};

struct ThresholdOptions {
  GammaRange range;
  int grid_points = 512;         // per downstream-induced interval
  double tolerance = 1e-7;       // bisection width in gamma
  double merge_tolerance = 1e-6; // breakpoints closer than this are one
  SolverLimits limits;
};

/// Sign of (q_nodeal - q_deal) at `s` under CRRA(gamma), computed with a
/// reference point that keeps the difference well conditioned. Positive
/// means No Deal.
double decision_advantage(const PrizeLadder& ladder, const RoundSchedule& schedule,
                          const BankerModel& banker, const GameState& s, double gamma,
                          const SolverLimits& limits = {});

/// Reusable breakpoint analysis over one game; memoizes per-state policies.
class ThresholdAnalyzer {
 public:
  ThresholdAnalyzer(PrizeLadder ladder, RoundSchedule schedule, BankerModel banker,
                    ThresholdOptions options = {});

  const GammaPolicy& policy(const GameState& s);
  const ThresholdOptions& options() const noexcept { return options_; }

 private:
  struct Probe {
    double advantage;
    double scale;
  };
  Probe probe(const GameState& s, double gamma);
  double refine(const GameState& s, double a, double b, bool sign_a);
  GammaPolicy compute(const GameState& s);

  PrizeLadder ladder_;
  RoundSchedule schedule_;
  BankerModel banker_;
  ThresholdOptions options_;
  std::map<GameState, GammaPolicy> memo_;
};

GammaPolicy decision_thresholds(const PrizeLadder& ladder, const RoundSchedule& schedule,
                                const BankerModel& banker, const GameState& s,
                                const ThresholdOptions& options = {});

enum class ConstraintKind { None, Upper, Lower, Union, Infeasible };

const char* to_string(ConstraintKind k);

struct RoundBound {
  int round = 0;  // 1-based
  Action observed = Action::NoDeal;
  ConstraintKind kind = ConstraintKind::None;
  double bound = 0.0;              // for Upper / Lower
  std::vector<Interval> feasible;  // gamma > 0 consistent with the choice
  bool risk_seeking = false;       // no positive gamma explains the choice
  GammaPolicy policy;
};

struct BoundsReport {
  std::vector<RoundBound> per_round;
  /// Intersection over gamma > 0 of all rounds not flagged risk seeking.
  std::vector<Interval> intersection;
  bool infeasible = false;
  std::vector<int> flagged_rounds;
  bool observed_deal = false;
  int first_round = 1;  // 1-based start of the analysis window
  GammaRange range;
};

struct InversionOptions {
  ThresholdOptions thresholds;
  /// 0-based first analysed round; by default the first round with at most
  /// `window_prizes` cases left.
  std::optional<int> from_round;
  int window_prizes = 4;
};

int default_window_start(const Trajectory& t, int window_prizes);

BoundsReport infer_gamma_bounds(const Trajectory& trajectory, const BankerModel& banker,
                                const InversionOptions& options = {});

/// Human-readable single-line summary, e.g. "gamma < 1.54085".
std::string summarize(const BoundsReport& report);

struct BenefitOptions {
  double cap_factor = 10.0;  // search b up to cap_factor * largest prize
  double tolerance = 0.01;   // currency units
};

/// Smallest nonnegative bonus b with u(offer) <= mean of u(prize + b) under
/// CRRA(gamma), to within `tolerance`. Returns exactly 0 when b = 0 already
/// satisfies the condition.
Money enjoyment_benefit(Money offer, std::span<const Money> prizes, double gamma,
                        const BenefitOptions& options = {});

}  // namespace dond
