#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dond/json_io.hpp"
#include "dond/solver.hpp"

namespace dond::api {

struct SolveRequest {
  std::vector<Money> ladder;
  std::vector<Money> remaining;  // empty: the full ladder
  std::optional<std::vector<int>> schedule;  // empty: one case per round
  BankerModel banker;
  UtilitySpec utility;
  std::vector<double> gamma_grid;
};

SolveRequest solve_request_from_json(const Json& j);

/// QResult at the requested state plus, when a gamma grid is given, one
/// CRRA result per gamma under "per_gamma".
Json solve(const SolveRequest& req, const SolverLimits& limits);

struct ThresholdsRequest {
  std::vector<Money> ladder;
  std::vector<Money> remaining;
  std::optional<std::vector<int>> schedule;
  BankerModel banker;
  GammaRange range;
};

ThresholdsRequest thresholds_request_from_json(const Json& j);
Json thresholds(const ThresholdsRequest& req, const SolverLimits& limits);

/// Uses `banker` when given, otherwise the multipliers implied by the
/// trajectory's own offers.
Json invert(const Trajectory& t, const std::optional<BankerModel>& banker,
            const InversionOptions& options);

Json benefit(Money offer, const std::vector<Money>& prizes, double gamma);

Json datasets();

Json error_body(const std::string& code, const std::string& message,
                std::optional<int> round = std::nullopt);

struct Response {
  int status = 200;
  std::string body;
};

/// Stateless router behind the HTTP service: malformed JSON -> 400,
/// semantic errors -> 422, unknown route -> 404.
Response handle(const std::string& method, const std::string& path, const std::string& body,
                const SolverLimits& limits);

/// HTTP front end. `start` binds and serves on a background thread.
class Server {
 public:
  explicit Server(SolverLimits limits, std::string static_dir = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dond::api
