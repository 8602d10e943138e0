// Acceptance gate: one PASS/FAIL line per primary criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
// Exit status is nonzero when any executed criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dond/cli.hpp"
#include "dond/inversion.hpp"
#include "dond/replication.hpp"
#include "dond/solver.hpp"
#include "oracle/brute_force.hpp"

using namespace dond;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    detail << ' ' << what << '=' << format_number(got);
    check(std::abs(got - want) <= tol, what + " want " + format_number(want) + " +- " +
                                           format_number(tol));
  }
};

using Check = std::function<void(Verdict&)>;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const PrizeLadder kBoard({25, 500, 750});
const RoundSchedule kOneByOne = RoundSchedule::one_at_a_time(3);

void log_ev_regression(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const QResult q = q_values(GameSpec{kBoard, kOneByOne, PureExpectedValue{}, LogUtility{}},
                             GameState{0b111, 0});
  const double secs = seconds_since(t0);
  v.near(q.q_deal, 6.052, 1e-3, "q_deal");
  v.near(q.q_nodeal, 5.989, 1e-3, "q_nodeal");
  v.detail << " action=" << to_string(q.action) << " time=" << secs << "s";
  v.check(q.action == Action::Deal, "action deal");
  v.check(secs < 1.0, "runtime < 1 s");
}

void log_online_regression(Verdict& v) {
  Solver s(GameSpec{kBoard, kOneByOne, OnlineRule{}, LogUtility{}});
  const QResult q = s.evaluate(GameState{0b111, 0});
  v.detail << " offer=" << format_number(q.offer);
  v.check(q.offer == 241.25, "offer exactly 241.25");
  v.near(q.q_nodeal, 5.764, 1e-3, "q_nodeal");
  v.near(q.ce_nodeal, 318.62, 0.05, "ce_nodeal");
  v.detail << " action=" << to_string(q.action);
  v.check(q.action == Action::NoDeal, "action no_deal");
  const std::tuple<CaseMask, double, double, const char*> subs[] = {
      {0b110, 6.415, 6.246, "{750,500}"},
      {0b101, 4.9194, 5.63, "{750,25}"},
      {0b011, 4.716, 5.247, "{500,25}"}};
  for (const auto& [mask, nodeal, deal, name] : subs) {
    const QResult c = s.evaluate(GameState{mask, 1});
    v.near(c.q_nodeal, nodeal, 1e-3, std::string(name) + ".q_nodeal");
    v.near(c.q_deal, deal, 1e-3, std::string(name) + ".q_deal");
  }
}

void online_thresholds(Verdict& v) {
  ThresholdAnalyzer an(kBoard, kOneByOne, OnlineRule{});
  const GammaPolicy& root = an.policy(GameState{0b111, 0});
  v.check(root.breakpoints.size() == 1, "one root breakpoint");
  if (!root.breakpoints.empty()) v.near(root.breakpoints[0], 4.5963, 1e-3, "root");
  const GammaPolicy& a = an.policy(GameState{0b101, 1});
  const GammaPolicy& b = an.policy(GameState{0b011, 1});
  v.check(a.breakpoints.size() == 1 && b.breakpoints.size() == 1, "one child breakpoint each");
  if (!a.breakpoints.empty()) v.near(a.breakpoints[0], 0.5602, 1e-3, "child{750,25}");
  if (!b.breakpoints.empty()) v.near(b.breakpoints[0], 0.5175, 1e-3, "child{500,25}");

  // Jensen: expected-value offers on two prizes are taken by every risk averter.
  std::mt19937_64 rng(2);
  bool jensen = true;
  for (int i = 0; i < 25; ++i) {
    const auto l = oracle::random_ladder(rng, 2);
    const GammaPolicy p =
        decision_thresholds(l, RoundSchedule({1}), PureExpectedValue{}, GameState{0b11, 0});
    for (int k = 1; k <= 2000; ++k) jensen = jensen && p.action_at(0.01 * k) == Action::Deal;
    for (double c : p.breakpoints) jensen = jensen && !(c > 0.0 && c <= 20.0);
  }
  v.detail << " jensen=" << (jensen ? "ok" : "violated");
  v.check(jensen, "EV two-prize states deal for gamma in (0,20]");
}

void suzanne_bounds(Verdict& v) {
  const Trajectory t = bundled_trajectory("suzanne");
  const TrajectoryGame g = trajectory_game(t);
  const MultiplierSchedule m = calibrate_multipliers(t);
  v.near(m.multipliers[6], 0.7331, 1e-4, "m7");
  v.near(m.multipliers[7], 0.90, 1e-4, "m8");
  v.near(m.multipliers[8], 1.00, 1e-4, "m9");
  ThresholdAnalyzer an(g.ladder, g.schedule, m);
  const std::pair<std::vector<double>, double> states[] = {
      {{0.5, 1000, 150000}, 0.22077},
      {{0.5, 1000, 100000}, 0.22617},
      {{0.5, 100000, 150000}, 1.50645},
      {{1000, 100000, 150000}, 1.54085}};
  for (const auto& [prizes, want] : states) {
    const GammaPolicy& p = an.policy(state_for(g.ladder, g.schedule, prizes));
    v.check(p.breakpoints.size() == 1, "single threshold");
    if (!p.breakpoints.empty()) v.near(p.breakpoints[0], want, 1e-3, "t");
  }
  const BoundsReport r = infer_gamma_bounds(t, m);
  v.check(r.intersection.size() == 1, "one intersection interval");
  if (!r.intersection.empty()) v.near(r.intersection.back().hi, 1.54085, 1e-3, "upper");
  const bool flagged = r.flagged_rounds == std::vector<int>{9} &&
                       r.per_round.back().kind == ConstraintKind::Infeasible;
  v.detail << " round9=" << (flagged ? "infeasible" : "not flagged");
  v.check(flagged, "round 9 flagged infeasible for gamma > 0");
}

void frank_multipliers(Verdict& v) {
  const auto rows = multiplier_table(bundled_trajectory("frank"));
  v.check(rows.size() == 9, "nine rounds");
  if (rows.size() != 9) return;
  v.check(rows[6].offer == 2400 && rows[7].offer == 3500 && rows[8].offer == 6000, "offers");
  v.near(rows[6].multiplier, 0.9571, 1e-4, "m7");
  v.near(rows[7].multiplier, 1.0469, 1e-4, "m8");
  v.near(rows[8].multiplier, 1.1988, 1e-4, "m9");
}

void enjoyment(Verdict& v) {
  const std::vector<double> prizes{100000, 150000};
  v.near(enjoyment_benefit(125000, prizes, 1.54085), 3761.90, 0.5, "b");
  const double zero = enjoyment_benefit(125000, prizes, 0.0);
  v.detail << " b(gamma=0)=" << zero;
  v.check(zero == 0.0, "exactly 0 at gamma = 0");
}

void oracle_equivalence(Verdict& v) {
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  std::size_t states = 0, breakpoints = 0, bracket_failures = 0;
  for (int i = 0; i < 50; ++i) {
    const auto g = oracle::random_game(rng, 6);
    const RoundSchedule sched(g.opens);
    const oracle::BruteForce bf{g.ladder, g.opens, g.banker, g.utility};
    Solver solver(GameSpec{g.ladder, sched, g.banker, g.utility});
    for (const auto& [s, q] : solver.policy(GameState{g.ladder.full_mask(), 0})) {
      const auto [d, nd] = bf.q(s.remaining, s.round);
      worst = std::max({worst, std::abs(d - q.q_deal), std::abs(nd - q.q_nodeal)});
      ++states;
    }
    ThresholdAnalyzer an(g.ladder, sched, g.banker);
    const GameState root{g.ladder.full_mask(), 0};
    for (double c : an.policy(root).breakpoints) {
      const double lo = decision_advantage(g.ladder, sched, g.banker, root, c - 1e-4);
      const double hi = decision_advantage(g.ladder, sched, g.banker, root, c + 1e-4);
      ++breakpoints;
      if (!(lo * hi < 0.0)) ++bracket_failures;
    }
  }
  v.detail << " boards=50 states=" << states << " max|diff|=" << worst
           << " breakpoints=" << breakpoints << " bracket_failures=" << bracket_failures;
  v.check(worst <= 1e-10, "solver equals brute force within 1e-10");
  v.check(bracket_failures == 0, "every breakpoint brackets a sign change");
}

double sample_money(std::mt19937_64& rng) {
  return std::pow(10.0, std::uniform_real_distribution<double>(-0.3, 6.7)(rng));
}

void properties(Verdict& v);

void replication_artifacts(Verdict& v) {
  const auto base = std::filesystem::temp_directory_path() / "dond_acceptance";
  std::filesystem::remove_all(base);
  bool deterministic = true, written = true;
  for (const char* name : {"suzanne", "frank"}) {
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
      const auto dir = base / std::to_string(k);
      std::ostringstream out, err;
      written = written && cli::run({"replicate", name, "--out", dir.string()}, out, err) == 0;
      for (const char* suffix : {"_report.json", "_figure.csv"}) {
        std::ifstream f(dir / (std::string(name) + suffix), std::ios::binary);
        written = written && f.good();
        runs[k] += std::string(std::istreambuf_iterator<char>(f), {});
      }
    }
    deterministic = deterministic && runs[0] == runs[1] && !runs[0].empty();
  }

  // Suzanne: the No-Deal value falls below the offer at round 9 for every gamma > 0.
  std::ifstream csv(base / "0" / "suzanne_figure.csv");
  std::string line;
  std::getline(csv, line);
  const bool header = line == "round,gamma,deal_value,continuation_ce";
  int rows9 = 0, below = 0;
  while (std::getline(csv, line)) {
    int round = 0;
    double gamma = 0, deal = 0, ce = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &round, &gamma, &deal, &ce) != 4) continue;
    if (round == 9 && gamma > 0) {
      ++rows9;
      if (ce < deal) ++below;
    }
  }
  std::filesystem::remove_all(base);
  v.detail << " deterministic=" << (deterministic ? "yes" : "no") << " round9 rows gamma>0: "
           << below << "/" << rows9 << " below offer";
  v.check(written, "artifacts written");
  v.check(header, "figure CSV header");
  v.check(deterministic, "byte-identical reruns");
  v.check(rows9 > 0 && below == rows9, "continuation CE below offer at round 9");
}

const std::string kPropertiesName = "property suites and total runtime";

struct Criterion {
  const char* name;
  Check run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"log utility / expected-value banker regression", log_ev_regression},
      {"log utility / online banker regression", log_online_regression},
      {"online banker gamma thresholds and Jensen property", online_thresholds},
      {"Suzanne thresholds, bound and round-9 flag", suzanne_bounds},
      {"Frank implied multipliers", frank_multipliers},
      {"enjoyment benefit", enjoyment},
      {"oracle equivalence and breakpoint bracketing", oracle_equivalence},
      {kPropertiesName.c_str(), properties},
      {"replication artifacts", replication_artifacts},
  };
  return all;
}

bool report(std::size_t index, bool print = true) {
  Verdict v;
  try {
    criteria()[index].run(v);
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  if (print)
    std::printf("%s C%zu %s:%s\n", v.pass ? "PASS" : "FAIL", index + 1, criteria()[index].name,
                v.detail.str().c_str());
  return v.pass;
}

void properties(Verdict& v) {
  std::mt19937_64 rng(1);

  // certainty equivalent inverts utility; sampled where u(x) is resolvable in
  // double precision (power term at least 1e-6)
  double worst_ce = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = sample_money(rng);
    UtilitySpec u;
    for (;;) {
      const auto pick = rng() % 3;
      if (pick == 0) {
        u = LogUtility{};
        break;
      }
      if (pick == 1) {
        const CrraUtility c{std::uniform_real_distribution<double>(-3.0, 8.0)(rng),
                            sample_money(rng)};
        if (std::pow(x / c.reference, 1.0 - c.gamma) >= 1e-6) {
          u = c;
          break;
        }
        continue;
      }
      const ExpPowerUtility e{std::uniform_real_distribution<double>(1e-5, 1e-3)(rng),
                              std::uniform_real_distribution<double>(0.3, 0.9)(rng),
                              std::uniform_real_distribution<double>(0.0, 100.0)(rng)};
      if (e.alpha * std::pow(e.wealth + x, 1.0 - e.gamma) <= 13.0) {
        u = e;
        break;
      }
    }
    worst_ce = std::max(worst_ce, std::abs(certainty_equivalent(u, utility_value(u, x)) - x) / x);
  }
  v.detail << " ce_roundtrip_max_rel=" << worst_ce;
  v.check(worst_ce < 1e-9, "CE roundtrip rel err < 1e-9");

  // CRRA at gamma = 1 +- 1e-6 against ln x over [0.5, 5e6]
  double worst_abs = 0.0, worst_rel = 0.0, worst_x = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = i == 20000 ? 5e6 : 0.5 * std::pow(1e7, i / 20000.0);
    const double l = std::log(x);
    for (double gamma : {1 - 1e-6, 1 + 1e-6}) {
      const double gap = std::abs(utility_value(CrraUtility{gamma}, x) - l);
      if (gap > worst_abs) {
        worst_abs = gap;
        worst_x = x;
      }
      if (l != 0.0) worst_rel = std::max(worst_rel, gap / std::abs(l));
    }
  }
  v.detail << " crra_log_max_abs=" << worst_abs << "@x=" << format_number(worst_x)
           << " (rel " << worst_rel << ")";
  v.check(worst_abs < 1e-4, "CRRA->log continuity < 1e-4");

  // affine argmax invariance and multiplier monotonicity, 20 boards each
  int affine_mismatch = 0, monotone_violations = 0;
  for (int i = 0; i < 20; ++i) {
    const auto g = oracle::random_game(rng, 6);
    const RoundSchedule sched(g.opens);
    const double gamma = std::uniform_real_distribution<double>(-1.0, 4.0)(rng);
    const auto pa = optimal_policy(GameSpec{g.ladder, sched, g.banker, CrraUtility{gamma}});
    const auto pb = optimal_policy(
        GameSpec{g.ladder, sched, g.banker, CrraUtility{gamma, sample_money(rng)}});
    for (const auto& [s, q] : pa) {
      const double scale = std::max(std::abs(q.q_deal), std::abs(q.q_nodeal));
      if (std::abs(q.q_deal - q.q_nodeal) > 1e-9 * scale && q.action != pb.at(s).action)
        ++affine_mismatch;
    }
  }
  std::uniform_real_distribution<double> m(0.1, 1.2), bump(0.0, 0.3);
  for (int i = 0; i < 20; ++i) {
    const auto g = oracle::random_game(rng, 6);
    const RoundSchedule sched(g.opens);
    MultiplierSchedule lo, hi;
    for (int r = 0; r < 6; ++r) {
      lo.multipliers.push_back(m(rng));
      hi.multipliers.push_back(lo.multipliers.back() + bump(rng));
    }
    const auto pl = optimal_policy(GameSpec{g.ladder, sched, lo, LogUtility{}});
    const auto ph = optimal_policy(GameSpec{g.ladder, sched, hi, LogUtility{}});
    for (const auto& [s, q] : pl)
      if (ph.at(s).q_deal < q.q_deal || ph.at(s).q_nodeal < q.q_nodeal - 1e-12)
        ++monotone_violations;
  }
  v.detail << " affine_mismatches=" << affine_mismatch
           << " multiplier_violations=" << monotone_violations;
  v.check(affine_mismatch == 0, "affine argmax invariance");
  v.check(monotone_violations == 0, "multiplier monotonicity");

  // the whole primary suite, run silently, within a minute
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria().size(); ++i)
    if (criteria()[i].name != kPropertiesName) report(i, false);
  const double secs = seconds_since(t0);
  v.detail << " other_criteria=" << secs << "s";
  v.check(secs < 60.0, "primary suite under 60 s");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (n < 1 || n > static_cast<int>(criteria().size())) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria().size());
        return 64;
      }
      selected.push_back(static_cast<std::size_t>(n - 1));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 64;
    }
  }
  if (selected.empty())
    for (std::size_t i = 0; i < criteria().size(); ++i) selected.push_back(i);

  bool ok = true;
  for (std::size_t i : selected) ok = report(i) && ok;
  return ok ? 0 : 1;
}
