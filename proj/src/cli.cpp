#include "dond/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"

#include "dond/api.hpp"
#include "dond/errors.hpp"
#include "dond/json_io.hpp"
#include "dond/replication.hpp"

namespace dond::cli {

namespace {

std::string join(const std::vector<Money>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + "}";
}

GammaRange parse_range(const std::string& text) {
  const auto v = parse_number_list(text);
  if (v.size() != 2 || !(v[0] < v[1]))
    throw ValidationError("--gamma-range expects lo,hi with lo < hi");
  return {v[0], v[1]};
}

Trajectory trajectory_arg(const std::string& arg) {
  if (std::filesystem::exists(arg)) return load_trajectory(arg);
  const auto names = dataset_names();
  if (std::find(names.begin(), names.end(), arg) != names.end()) return bundled_trajectory(arg);
  throw ValidationError("trajectory '" + arg + "' is neither a file nor a bundled dataset");
}

void print_row(std::ostream& out, const char* key, const std::string& value) {
  out << std::left << std::setw(11) << key << value << '\n';
}

void print_policy(std::ostream& out, const GammaPolicy& p) {
  const auto iv = p.intervals();
  for (std::size_t i = 0; i < iv.size(); ++i)
    out << "  (" << format_number(iv[i].lo) << ", " << format_number(iv[i].hi) << ")  "
        << to_string(p.actions[i]) << '\n';
  if (!p.downstream.empty()) {
    out << "  downstream breakpoints:";
    for (double d : p.downstream) out << ' ' << format_number(d);
    out << '\n';
  }
}

std::string constraint_text(const RoundBound& b) {
  switch (b.kind) {
    case ConstraintKind::None: return "no constraint";
    case ConstraintKind::Upper: return "gamma < " + format_number(b.bound);
    case ConstraintKind::Lower: return "gamma > " + format_number(b.bound);
    case ConstraintKind::Infeasible:
      return b.risk_seeking ? "infeasible for gamma>0 (risk seeking)" : "infeasible for gamma>0";
    case ConstraintKind::Union: {
      std::string s;
      for (std::size_t i = 0; i < b.feasible.size(); ++i)
        s += (i ? " or " : "") + format_number(b.feasible[i].lo) + " < gamma < " +
             format_number(b.feasible[i].hi);
      return s;
    }
  }
  return {};
}

void print_multipliers(std::ostream& out, const std::vector<MultiplierRow>& rows) {
  out << "round  offer        mean         multiplier\n";
  for (const auto& m : rows)
    out << std::left << std::setw(7) << m.round << std::setw(13) << format_number(m.offer)
        << std::setw(13) << format_number(m.mean) << format_number(m.multiplier) << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path.string() + "'");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deal or No Deal decision engine", "dond"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Q-values and optimal action at a state");
  std::string prizes, remaining, banker = "ev", utility = "log", schedule, extrapolation,
                                 gamma_grid;
  bool json = false;
  solve->add_option("--prizes", prizes, "board, comma separated")->required();
  solve->add_option("--remaining", remaining, "prizes still in play (default: all)");
  solve->add_option("--banker", banker, "ev | online | multipliers:<csv>");
  solve->add_option("--utility", utility, "log | crra:<g> | exppower:<a>,<g>,<W>");
  solve->add_option("--schedule", schedule, "cases opened per round, e.g. 1,1");
  solve->add_option("--extrapolation", extrapolation, "hold_last | linear_trend");
  solve->add_option("--gamma-grid", gamma_grid, "extra CRRA gammas to evaluate");
  solve->add_flag("--json", json, "print JSON");

  // thresholds
  auto* thr = app.add_subcommand("thresholds", "gamma breakpoints of the optimal action");
  std::string range;
  thr->add_option("--prizes", prizes, "board, comma separated")->required();
  thr->add_option("--remaining", remaining, "prizes still in play (default: all)");
  thr->add_option("--banker", banker, "ev | online | multipliers:<csv>");
  thr->add_option("--schedule", schedule, "cases opened per round");
  thr->add_option("--gamma-range", range, "lo,hi (default -5,20)");
  thr->add_flag("--json", json, "print JSON");

  // invert
  auto* inv = app.add_subcommand("invert", "risk-aversion bounds from observed choices");
  std::string trajectory, inv_banker;
  int from_round = 0;
  inv->add_option("--trajectory", trajectory, "trajectory JSON file or bundled name")
      ->required();
  inv->add_option("--banker", inv_banker, "banker model (default: calibrated multipliers)");
  inv->add_option("--gamma-range", range, "lo,hi (default -5,20)");
  inv->add_option("--from-round", from_round, "first analysed round (1-based)");
  inv->add_flag("--json", json, "print JSON");

  // replicate
  auto* rep = app.add_subcommand("replicate", "reproduce a bundled case study");
  std::string dataset, out_dir = ".";
  rep->add_option("name", dataset, "suzanne | frank")->required();
  rep->add_option("--out", out_dir, "output directory");

  // benefit
  auto* ben = app.add_subcommand("benefit", "enjoyment bonus that justifies No Deal");
  double offer = 0.0, gamma = 0.0;
  ben->add_option("--offer", offer, "final banker offer")->required();
  ben->add_option("--prizes", prizes, "remaining prizes")->required();
  ben->add_option("--gamma", gamma, "CRRA coefficient")->required();
  ben->add_flag("--json", json, "print JSON");

  // serve
  auto* srv = app.add_subcommand("serve", "HTTP JSON API and optional static UI");
  int port = 8080;
  std::string host = "127.0.0.1", static_dir;
  srv->add_option("--port", port, "listen port");
  srv->add_option("--host", host, "listen address");
  srv->add_option("--static", static_dir, "directory of UI assets");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    const SolverLimits limits = SolverLimits::from_env();

    if (*solve) {
      api::SolveRequest req;
      req.ladder = parse_number_list(prizes);
      if (!remaining.empty()) req.remaining = parse_number_list(remaining);
      if (!schedule.empty()) req.schedule = parse_count_list(schedule);
      req.banker = parse_banker_descriptor(banker);
      if (!extrapolation.empty()) {
        auto* m = std::get_if<MultiplierSchedule>(&req.banker);
        if (!m) throw ValidationError("--extrapolation applies to multiplier bankers only");
        if (extrapolation == "hold_last") m->extrapolation = Extrapolation::HoldLast;
        else if (extrapolation == "linear_trend") m->extrapolation = Extrapolation::LinearTrend;
        else throw ValidationError("--extrapolation expects hold_last or linear_trend");
      }
      req.utility = parse_utility_descriptor(utility);
      if (!gamma_grid.empty()) req.gamma_grid = parse_number_list(gamma_grid);
      const Json r = api::solve(req, limits);
      if (json) {
        out << r.dump(2) << '\n';
        return kExitOk;
      }
      const auto& st = r["state"];
      print_row(out, "state", join(st["remaining"].get<std::vector<double>>()) + " round " +
                                  std::to_string(st["round"].get<int>()) +
                                  (r["terminal"].get<bool>() ? " (terminal)" : ""));
      print_row(out, "utility", describe(req.utility));
      print_row(out, "offer", format_number(r["offer"].get<double>()) + " (" +
                                  r["offer_rule"].get<std::string>() + ")");
      print_row(out, "q_deal", format_number(r["q_deal"].get<double>()));
      print_row(out, "q_nodeal", format_number(r["q_nodeal"].get<double>()));
      print_row(out, "ce_nodeal", format_number(r["ce_nodeal"].get<double>()));
      print_row(out, "action", r["action"].get<std::string>());
      if (r.contains("per_gamma")) {
        out << "gamma      offer      ce_nodeal  action\n";
        for (const auto& row : r["per_gamma"])
          out << std::left << std::setw(11) << format_number(row["gamma"].get<double>())
              << std::setw(11) << format_number(row["offer"].get<double>()) << std::setw(11)
              << format_number(row["ce_nodeal"].get<double>())
              << row["action"].get<std::string>() << '\n';
      }
      return kExitOk;
    }

    if (*thr) {
      api::ThresholdsRequest req;
      req.ladder = parse_number_list(prizes);
      if (!remaining.empty()) req.remaining = parse_number_list(remaining);
      if (!schedule.empty()) req.schedule = parse_count_list(schedule);
      req.banker = parse_banker_descriptor(banker);
      if (!range.empty()) req.range = parse_range(range);
      const Json r = api::thresholds(req, limits);
      if (json) {
        out << r.dump(2) << '\n';
        return kExitOk;
      }
      out << "root breakpoints:";
      for (const auto& b : r["root_breakpoints"]) out << ' ' << format_number(b.get<double>());
      out << "\ndownstream breakpoints:";
      for (const auto& b : r["downstream_breakpoints"])
        out << ' ' << format_number(b.get<double>());
      out << '\n';
      for (const auto& iv : r["intervals"])
        out << "  (" << format_number(iv["lo"].get<double>()) << ", "
            << format_number(iv["hi"].get<double>()) << ")  " << iv["action"].get<std::string>()
            << '\n';
      return kExitOk;
    }

    if (*inv) {
      const Trajectory t = trajectory_arg(trajectory);
      InversionOptions opts;
      opts.thresholds.limits = limits;
      if (!range.empty()) opts.thresholds.range = parse_range(range);
      if (inv->count("--from-round")) {
        if (from_round < 1) throw ValidationError("--from-round is 1-based");
        opts.from_round = from_round - 1;
      }
      std::optional<BankerModel> model;
      if (!inv_banker.empty()) model = parse_banker_descriptor(inv_banker);
      const Json r = api::invert(t, model, opts);
      if (json) {
        out << r.dump(2) << '\n';
        return kExitOk;
      }
      const BankerModel used = model ? *model : BankerModel{calibrate_multipliers(t)};
      const BoundsReport report = infer_gamma_bounds(t, used, opts);
      out << "contestant " << t.contestant << " (" << t.currency << ")\n";
      print_multipliers(out, multiplier_table(t));
      out << '\n';
      for (const auto& b : report.per_round) {
        out << "round " << b.round << "  " << to_string(b.observed) << "  "
            << constraint_text(b) << '\n';
        print_policy(out, b.policy);
      }
      out << "\nbound: " << summarize(report) << '\n';
      if (!report.observed_deal)
        out << "no Deal observed, so no lower bound on gamma is available\n";
      return kExitOk;
    }

    if (*rep) {
      InversionOptions opts;
      opts.thresholds.limits = limits;
      const CaseStudy c = replicate_case_study(dataset, opts);
      std::filesystem::create_directories(out_dir);
      const auto report_path = std::filesystem::path(out_dir) / (dataset + "_report.json");
      const auto figure_path = std::filesystem::path(out_dir) / (dataset + "_figure.csv");
      write_file(report_path, to_json(c).dump(2) + "\n");
      write_file(figure_path, figure_csv(c.figure));
      out << "contestant " << c.trajectory.contestant << '\n';
      print_multipliers(out, c.multipliers);
      out << "bound: " << summarize(c.bounds) << '\n';
      if (c.benefit) {
        out << "terminal round " << c.benefit->round << ": enjoyment benefit at gamma "
            << format_number(c.benefit->gamma) << " = "
            << (c.benefit->benefit ? format_number(*c.benefit->benefit) : "unbounded") << '\n';
      }
      out << "wrote " << report_path.string() << '\n' << "wrote " << figure_path.string() << '\n';
      return kExitOk;
    }

    if (*ben) {
      const Json r = api::benefit(offer, parse_number_list(prizes), gamma);
      if (json) {
        out << r.dump(2) << '\n';
        return kExitOk;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f", r["b"].get<double>());
      out << buf << '\n';
      return kExitOk;
    }

    if (*srv) {
      api::Server server(limits, static_dir);
      out << "serving on http://" << host << ':' << port << std::endl;
      server.run(host, port);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error [" << e.code() << "]";
    if (e.round()) err << " round " << *e.round();
    err << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace dond::cli
