#include "dond/api.hpp"

#include <cmath>
#include <sstream>

#include "httplib.h"

#include "dond/errors.hpp"
#include "dond/inversion.hpp"
#include "dond/replication.hpp"

namespace dond::api {

namespace {

struct Game {
  PrizeLadder ladder;
  RoundSchedule schedule;
  GameState state;
};

Game build_game(const std::vector<Money>& ladder_values, const std::vector<Money>& remaining,
                const std::optional<std::vector<int>>& schedule) {
  PrizeLadder ladder = PrizeLadder::from_unsorted(ladder_values);
  RoundSchedule sched = schedule ? RoundSchedule(*schedule)
                                 : RoundSchedule::one_at_a_time(ladder.size());
  sched.validate_for(ladder.size());
  const GameState s = remaining.empty()
                          ? GameState{ladder.full_mask(), 0}
                          : state_for(ladder, sched, remaining);
  return {std::move(ladder), std::move(sched), s};
}

std::vector<double> numbers(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError(std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::optional<std::vector<int>> schedule_from(const Json& j) {
  if (!j.contains("schedule") || j["schedule"].is_null()) return std::nullopt;
  std::vector<int> out;
  for (double v : numbers(j["schedule"], "schedule")) {
    if (v != std::floor(v) || v < 1 || v > 64)
      throw ValidationError("schedule entries must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

GammaRange range_from(const Json& j, GammaRange fallback) {
  if (!j.contains("gamma_range") || j["gamma_range"].is_null()) return fallback;
  const auto v = numbers(j["gamma_range"], "gamma_range");
  if (v.size() != 2 || !(v[0] < v[1]))
    throw ValidationError("gamma_range must be [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(std::string("request is missing \"") + key + "\"");
  return j.at(key);
}

Json state_json(const Game& g) {
  return Json{{"remaining", g.ladder.values(g.state.remaining)}, {"round", g.state.round}};
}

}  // namespace

SolveRequest solve_request_from_json(const Json& j) {
  SolveRequest r;
  r.ladder = numbers(field(j, "ladder"), "ladder");
  if (j.contains("remaining") && !j["remaining"].is_null())
    r.remaining = numbers(j["remaining"], "remaining");
  r.schedule = schedule_from(j);
  r.banker = banker_from_json(field(j, "banker"));
  r.utility = j.contains("utility") ? utility_from_json(j["utility"]) : UtilitySpec{LogUtility{}};
  if (j.contains("gamma_grid") && !j["gamma_grid"].is_null())
    r.gamma_grid = numbers(j["gamma_grid"], "gamma_grid");
  return r;
}

Json solve(const SolveRequest& req, const SolverLimits& limits) {
  const Game g = build_game(req.ladder, req.remaining, req.schedule);
  Solver solver(GameSpec{g.ladder, g.schedule, req.banker, req.utility}, limits);
  const QResult q = solver.evaluate(g.state);

  Json out{{"state", state_json(g)},
           {"banker", to_json(req.banker)},
           {"utility", to_json(req.utility)},
           {"terminal", g.state.count() == 1}};
  const Json qj = to_json(q);
  for (auto it = qj.begin(); it != qj.end(); ++it) out[it.key()] = it.value();

  if (!req.gamma_grid.empty()) {
    Json per = Json::array();
    for (double gamma : req.gamma_grid) {
      UtilitySpec u = CrraUtility{gamma};
      validate_utility(u);
      Solver s(GameSpec{g.ladder, g.schedule, req.banker, u}, limits);
      Json row{{"gamma", gamma}};
      const Json rj = to_json(s.evaluate(g.state));
      for (auto it = rj.begin(); it != rj.end(); ++it) row[it.key()] = it.value();
      per.push_back(std::move(row));
    }
    out["per_gamma"] = std::move(per);
  }
  return out;
}

ThresholdsRequest thresholds_request_from_json(const Json& j) {
  ThresholdsRequest r;
  r.ladder = numbers(field(j, "ladder"), "ladder");
  if (j.contains("remaining") && !j["remaining"].is_null())
    r.remaining = numbers(j["remaining"], "remaining");
  r.schedule = schedule_from(j);
  r.banker = banker_from_json(field(j, "banker"));
  r.range = range_from(j, GammaRange{});
  return r;
}

Json thresholds(const ThresholdsRequest& req, const SolverLimits& limits) {
  const Game g = build_game(req.ladder, req.remaining, req.schedule);
  ThresholdOptions opts;
  opts.range = req.range;
  opts.limits = limits;
  const GammaPolicy p = decision_thresholds(g.ladder, g.schedule, req.banker, g.state, opts);
  Json out{{"state", state_json(g)}, {"banker", to_json(req.banker)}};
  const Json pj = to_json(p);
  for (auto it = pj.begin(); it != pj.end(); ++it) out[it.key()] = it.value();
  return out;
}

Json invert(const Trajectory& t, const std::optional<BankerModel>& banker,
            const InversionOptions& options) {
  const BankerModel model = banker ? *banker : BankerModel{calibrate_multipliers(t)};
  const BoundsReport report = infer_gamma_bounds(t, model, options);
  Json multipliers = Json::array();
  for (const auto& m : multiplier_table(t))
    multipliers.push_back(Json{{"round", m.round},
                               {"offer", m.offer},
                               {"mean", m.mean},
                               {"multiplier", m.multiplier}});
  Json out{{"contestant", t.contestant},
           {"banker", to_json(model)},
           {"multipliers", std::move(multipliers)}};
  const Json rj = to_json(report);
  for (auto it = rj.begin(); it != rj.end(); ++it) out[it.key()] = it.value();
  return out;
}

Json benefit(Money offer, const std::vector<Money>& prizes, double gamma) {
  return Json{{"offer", offer},
              {"prizes", prizes},
              {"gamma", gamma},
              {"b", enjoyment_benefit(offer, prizes, gamma)}};
}

Json datasets() {
  Json list = Json::array();
  for (const auto& name : dataset_names()) {
    const Trajectory t = bundled_trajectory(name);
    list.push_back(Json{{"name", name},
                        {"contestant", t.contestant},
                        {"currency", t.currency},
                        {"rounds", t.rounds.size()},
                        {"trajectory", to_json(t)}});
  }
  return Json{{"datasets", std::move(list)}};
}

Json error_body(const std::string& code, const std::string& message, std::optional<int> round) {
  Json e{{"code", code}, {"message", message}};
  if (round) e["round"] = *round;
  return Json{{"error", std::move(e)}};
}

// ---------------------------------------------------------------------------

namespace {

Json parse_body(const std::string& body) {
  return Json::parse(body);  // parse_error surfaces as 400
}

InversionOptions inversion_options(const Json& j, const SolverLimits& limits) {
  InversionOptions opts;
  opts.thresholds.limits = limits;
  opts.thresholds.range = range_from(j, GammaRange{});
  if (j.contains("from_round") && !j["from_round"].is_null()) {
    if (!j["from_round"].is_number_integer() || j["from_round"].get<int>() < 1)
      throw ValidationError("from_round must be a positive round number");
    opts.from_round = j["from_round"].get<int>() - 1;
  }
  return opts;
}

Response route(const std::string& method, const std::string& path, const std::string& body,
               const SolverLimits& limits) {
  auto ok = [](const Json& j) { return Response{200, j.dump()}; };
  const bool get = method == "GET";
  const bool post = method == "POST";

  if (path == "/api/health") {
    if (!get) return {405, error_body("method_not_allowed", "use GET").dump()};
    return ok(Json{{"status", "ok"}});
  }
  if (path == "/api/datasets") {
    if (!get) return {405, error_body("method_not_allowed", "use GET").dump()};
    return ok(datasets());
  }
  if (path == "/api/solve" || path == "/api/thresholds" || path == "/api/invert" ||
      path == "/api/benefit") {
    if (!post) return {405, error_body("method_not_allowed", "use POST").dump()};
    const Json j = parse_body(body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    if (path == "/api/solve") return ok(solve(solve_request_from_json(j), limits));
    if (path == "/api/thresholds")
      return ok(thresholds(thresholds_request_from_json(j), limits));
    if (path == "/api/invert") {
      const Json& traj = j.contains("trajectory") ? j["trajectory"] : j;
      std::optional<BankerModel> banker;
      if (j.contains("banker") && !j["banker"].is_null()) banker = banker_from_json(j["banker"]);
      return ok(invert(trajectory_from_json(traj), banker, inversion_options(j, limits)));
    }
    const Json& g = field(j, "gamma");
    const Json& o = field(j, "offer");
    if (!g.is_number() || !o.is_number()) throw ValidationError("offer and gamma must be numbers");
    return ok(benefit(o.get<double>(), numbers(field(j, "prizes"), "prizes"), g.get<double>()));
  }
  return {404, error_body("not_found", "no route for " + path).dump()};
}

}  // namespace

Response handle(const std::string& method, const std::string& path, const std::string& body,
                const SolverLimits& limits) {
  try {
    return route(method, path, body, limits);
  } catch (const Json::parse_error& e) {
    return {400, error_body("malformed_json", e.what()).dump()};
  } catch (const Error& e) {
    const int status = e.code() == "malformed_json" ? 400 : 422;
    return {status, error_body(e.code(), e.what(), e.round()).dump()};
  } catch (const Json::exception& e) {
    return {422, error_body("validation_error", e.what()).dump()};
  } catch (const std::exception& e) {
    return {500, error_body("internal", e.what()).dump()};
  }
}

// ---------------------------------------------------------------------------

struct Server::Impl {
  SolverLimits limits;
  std::string static_dir;
  httplib::Server http;
  std::thread thread;
};

Server::Server(SolverLimits limits, std::string static_dir) : impl_(std::make_unique<Impl>()) {
  impl_->limits = limits;
  impl_->static_dir = std::move(static_dir);
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle(req.method, req.path, req.body, impl_->limits);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  // httplib also sets SO_REUSEPORT by default, which lets a second server
  // silently share a busy port.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  impl_->http.Get(R"(/api/.*)", dispatch);
  impl_->http.Post(R"(/api/.*)", dispatch);
  if (!impl_->static_dir.empty() && !impl_->http.set_mount_point("/", impl_->static_dir))
    throw ValidationError("static directory '" + impl_->static_dir + "' does not exist");
}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    std::ostringstream os;
    os << "cannot listen on " << host << ':' << port << " (port in use?)";
    throw Error("port_in_use", os.str());
  }
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::run(const std::string& host, int port) {
  if (!impl_->http.bind_to_port(host, port)) {
    std::ostringstream os;
    os << "cannot listen on " << host << ':' << port << " (port in use?)";
    throw Error("port_in_use", os.str());
  }
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace dond::api
