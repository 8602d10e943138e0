#include "dond/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dond/errors.hpp"

namespace dond {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

double parse_double(const std::string& raw, const std::string& what) {
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("cannot parse " + what + " '" + raw + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(where + " is missing \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ValidationError(what + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what));
  return out;
}

Extrapolation extrapolation_from(const std::string& s) {
  if (s == "hold_last") return Extrapolation::HoldLast;
  if (s == "linear_trend") return Extrapolation::LinearTrend;
  throw ValidationError("unknown extrapolation '" + s + "' (hold_last|linear_trend)");
}

}  // namespace

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& part : split(csv, ',')) out.push_back(parse_double(part, "number"));
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

std::vector<int> parse_count_list(const std::string& csv) {
  std::vector<int> out;
  for (double v : parse_number_list(csv)) {
    if (v != std::floor(v) || v < 1 || v > 64)
      throw ValidationError("schedule entries must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

BankerModel parse_banker_descriptor(const std::string& text) {
  if (text == "ev") return PureExpectedValue{};
  if (text == "online") return OnlineRule{};
  const std::string prefix = "multipliers:";
  if (text.rfind(prefix, 0) == 0) {
    MultiplierSchedule m{parse_number_list(text.substr(prefix.size()))};
    validate_banker(m);
    return m;
  }
  throw ValidationError("unknown banker '" + text + "' (ev|online|multipliers:<csv>)");
}

UtilitySpec parse_utility_descriptor(const std::string& text) {
  if (text == "log") return LogUtility{};
  if (text.rfind("crra:", 0) == 0) {
    UtilitySpec u = CrraUtility{parse_double(text.substr(5), "gamma")};
    validate_utility(u);
    return u;
  }
  if (text.rfind("exppower:", 0) == 0) {
    const auto v = parse_number_list(text.substr(9));
    if (v.size() != 3) throw ValidationError("exppower needs <alpha>,<gamma>,<W>");
    UtilitySpec u = ExpPowerUtility{v[0], v[1], v[2]};
    validate_utility(u);
    return u;
  }
  throw ValidationError("unknown utility '" + text + "' (log|crra:<g>|exppower:<a>,<g>,<W>)");
}

BankerModel banker_from_json(const Json& j) {
  if (j.is_string()) return parse_banker_descriptor(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("banker must be a string or an object");
  const Json& kind = require(j, "kind", "banker");
  if (!kind.is_string()) throw ValidationError("banker kind must be a string");
  const auto k = kind.get<std::string>();
  BankerModel out;
  if (k == "ev") {
    out = PureExpectedValue{};
  } else if (k == "multipliers") {
    MultiplierSchedule m{numbers(require(j, "multipliers", "banker"), "multipliers")};
    if (j.contains("extrapolation")) {
      if (!j["extrapolation"].is_string()) throw ValidationError("extrapolation must be a string");
      m.extrapolation = extrapolation_from(j["extrapolation"].get<std::string>());
    }
    out = std::move(m);
  } else if (k == "online") {
    OnlineRule r;
    if (j.contains("coeff3_big")) r.coeff3_big = number(j["coeff3_big"], "coeff3_big");
    if (j.contains("coeff3_small")) r.coeff3_small = number(j["coeff3_small"], "coeff3_small");
    if (j.contains("coeff2_big")) r.coeff2_big = number(j["coeff2_big"], "coeff2_big");
    if (j.contains("coeff2_small")) r.coeff2_small = number(j["coeff2_small"], "coeff2_small");
    if (j.contains("fallback"))
      r.fallback = std::make_shared<const BankerModel>(banker_from_json(j["fallback"]));
    out = std::move(r);
  } else {
    throw ValidationError("unknown banker kind '" + k + "'");
  }
  validate_banker(out);
  return out;
}

UtilitySpec utility_from_json(const Json& j) {
  if (j.is_string()) return parse_utility_descriptor(j.get<std::string>());
  if (!j.is_object()) throw ValidationError("utility must be a string or an object");
  const Json& kind = require(j, "kind", "utility");
  if (!kind.is_string()) throw ValidationError("utility kind must be a string");
  const auto k = kind.get<std::string>();
  UtilitySpec out;
  if (k == "log") {
    out = LogUtility{};
  } else if (k == "crra") {
    out = CrraUtility{number(require(j, "gamma", "utility"), "gamma")};
  } else if (k == "exp_power") {
    out = ExpPowerUtility{number(require(j, "alpha", "utility"), "alpha"),
                          number(require(j, "gamma", "utility"), "gamma"),
                          j.contains("wealth") ? number(j["wealth"], "wealth") : 0.0};
  } else {
    throw ValidationError("unknown utility kind '" + k + "'");
  }
  validate_utility(out);
  return out;
}

Json to_json(const BankerModel& b) {
  return std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PureExpectedValue>) {
          return Json{{"kind", "ev"}};
        } else if constexpr (std::is_same_v<T, MultiplierSchedule>) {
          return Json{{"kind", "multipliers"},
                      {"multipliers", m.multipliers},
                      {"extrapolation", to_string(m.extrapolation)}};
        } else {
          Json j{{"kind", "online"},
                 {"coeff3_big", m.coeff3_big},
                 {"coeff3_small", m.coeff3_small},
                 {"coeff2_big", m.coeff2_big},
                 {"coeff2_small", m.coeff2_small}};
          j["fallback"] = m.fallback ? to_json(*m.fallback) : Json{{"kind", "ev"}};
          return j;
        }
      },
      b);
}

Json to_json(const UtilitySpec& u) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LogUtility>) {
          return Json{{"kind", "log"}};
        } else if constexpr (std::is_same_v<T, CrraUtility>) {
          return Json{{"kind", "crra"}, {"gamma", f.gamma}};
        } else {
          return Json{{"kind", "exp_power"}, {"alpha", f.alpha}, {"gamma", f.gamma},
                      {"wealth", f.wealth}};
        }
      },
      u);
}

// ---------------------------------------------------------------------------

Trajectory trajectory_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("trajectory must be a JSON object");
  Trajectory t;
  const Json& name = require(j, "contestant", "trajectory");
  const Json& currency = require(j, "currency", "trajectory");
  if (!name.is_string() || !currency.is_string())
    throw ValidationError("contestant and currency must be strings");
  t.contestant = name.get<std::string>();
  t.currency = currency.get<std::string>();
  if (j.contains("board")) t.board = numbers(j["board"], "board");

  const Json& rounds = require(j, "rounds", "trajectory");
  if (!rounds.is_array()) throw ValidationError("rounds must be an array");
  int label = 0;
  for (const auto& r : rounds) {
    ++label;
    try {
      if (!r.is_object()) throw ValidationError("round must be an object");
      TrajectoryRound tr;
      tr.remaining = numbers(require(r, "remaining", "round"), "remaining");
      if (r.contains("offer") && !r["offer"].is_null()) tr.offer = number(r["offer"], "offer");
      if (r.contains("decision") && !r["decision"].is_null()) {
        if (!r["decision"].is_string()) throw ValidationError("decision must be a string");
        tr.decision = action_from_string(r["decision"].get<std::string>());
      }
      if (r.contains("note") && r["note"].is_string()) tr.note = r["note"].get<std::string>();
      t.rounds.push_back(std::move(tr));
    } catch (const ValidationError& e) {
      if (e.round()) throw;
      throw ValidationError(e.what(), label);
    }
  }
  validate_trajectory(t);
  return t;
}

Json to_json(const Trajectory& t) {
  Json rounds = Json::array();
  for (const auto& r : t.rounds) {
    Json jr{{"remaining", r.remaining}};
    if (r.offer) jr["offer"] = *r.offer;
    if (r.decision) jr["decision"] = to_string(*r.decision);
    if (!r.note.empty()) jr["note"] = r.note;
    rounds.push_back(std::move(jr));
  }
  Json j{{"contestant", t.contestant}, {"currency", t.currency}};
  if (!t.board.empty()) j["board"] = t.board;
  j["rounds"] = std::move(rounds);
  return j;
}

Json to_json(const QResult& q) {
  return Json{{"offer", q.offer},         {"q_deal", q.q_deal},
              {"q_nodeal", q.q_nodeal},   {"ce_nodeal", q.ce_nodeal},
              {"action", to_string(q.action)}, {"offer_rule", to_string(q.offer_rule)}};
}

Json to_json(const Interval& i) { return Json{{"lo", i.lo}, {"hi", i.hi}}; }

Json to_json(const GammaPolicy& p) {
  Json intervals = Json::array();
  const auto iv = p.intervals();
  for (std::size_t i = 0; i < iv.size(); ++i) {
    Json x = to_json(iv[i]);
    x["action"] = to_string(p.actions[i]);
    intervals.push_back(std::move(x));
  }
  return Json{{"range", {p.range.lo, p.range.hi}},
              {"breakpoints", p.all_breakpoints()},
              {"root_breakpoints", p.breakpoints},
              {"downstream_breakpoints", p.downstream},
              {"intervals", std::move(intervals)}};
}

Json to_json(const BoundsReport& r) {
  Json rounds = Json::array();
  for (const auto& b : r.per_round) {
    Json c{{"kind", to_string(b.kind)}};
    if (b.kind == ConstraintKind::Upper || b.kind == ConstraintKind::Lower) c["bound"] = b.bound;
    Json feasible = Json::array();
    for (const auto& f : b.feasible) feasible.push_back(to_json(f));
    rounds.push_back(Json{{"round", b.round},
                          {"observed", to_string(b.observed)},
                          {"constraint", std::move(c)},
                          {"feasible", std::move(feasible)},
                          {"risk_seeking", b.risk_seeking},
                          {"thresholds", to_json(b.policy)}});
  }
  Json inter = Json::array();
  for (const auto& i : r.intersection) inter.push_back(to_json(i));
  return Json{{"range", {r.range.lo, r.range.hi}},
              {"first_round", r.first_round},
              {"per_round", std::move(rounds)},
              {"intersection", std::move(inter)},
              {"infeasible", r.infeasible},
              {"flagged_rounds", r.flagged_rounds},
              {"observed_deal", r.observed_deal},
              {"lower_bound_available", r.observed_deal},
              {"note", r.observed_deal
                           ? "a Deal ended the game; it supplies the only possible lower bound"
                           : "no Deal observed: choices bound gamma from above only"},
              {"summary", summarize(r)}};
}

std::string figure_csv(const std::vector<SeriesRow>& rows) {
  std::ostringstream os;
  os << "round,gamma,deal_value,continuation_ce\n";
  for (const auto& r : rows)
    os << r.round << ',' << format_number(r.gamma) << ',' << format_number(r.deal_value) << ','
       << format_number(r.continuation_ce) << '\n';
  return os.str();
}

}  // namespace dond
