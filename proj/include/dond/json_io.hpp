#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "dond/banker.hpp"
#include "dond/core_model.hpp"
#include "dond/inversion.hpp"
#include "dond/solver.hpp"
#include "dond/trajectory.hpp"

namespace dond {

using Json = nlohmann::ordered_json;

// Descriptor strings shared by the CLI and the HTTP API:
//   banker:  ev | online | multipliers:<m0,m1,...>
//   utility: log | crra:<gamma> | exppower:<alpha>,<gamma>,<W>
BankerModel parse_banker_descriptor(const std::string& text);
UtilitySpec parse_utility_descriptor(const std::string& text);

std::vector<double> parse_number_list(const std::string& csv);
std::vector<int> parse_count_list(const std::string& csv);

/// Accepts either a descriptor string or an object such as
/// {"kind":"multipliers","multipliers":[...],"extrapolation":"hold_last"}.
BankerModel banker_from_json(const Json& j);
UtilitySpec utility_from_json(const Json& j);
Json to_json(const BankerModel& b);
Json to_json(const UtilitySpec& u);

/// Trajectory document: {"contestant","currency","rounds":[{"remaining",
/// "offer"?, "decision"?}]}. Also tolerates "board" and "note" keys.
Trajectory trajectory_from_json(const Json& j);
Json to_json(const Trajectory& t);

Json to_json(const QResult& q);
Json to_json(const Interval& i);
Json to_json(const GammaPolicy& p);
Json to_json(const BoundsReport& r);

/// Figure CSV: header `round,gamma,deal_value,continuation_ce`, values with
/// six significant digits.
std::string figure_csv(const std::vector<SeriesRow>& rows);

/// `%.6g` rendering used in text and CSV output.
std::string format_number(double v);

}  // namespace dond
