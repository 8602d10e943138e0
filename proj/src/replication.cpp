#include "dond/replication.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dond/errors.hpp"

namespace dond {

namespace detail {
extern const std::string kSuzanneDocument;
extern const std::string kFrankDocument;
}  // namespace detail

Trajectory parse_trajectory(const std::string& document) {
  Json j;
  try {
    j = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw Error("malformed_json", std::string("trajectory is not valid JSON: ") + e.what());
  }
  return trajectory_from_json(j);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trajectory file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_trajectory(os.str());
}

std::vector<std::string> dataset_names() { return {"suzanne", "frank"}; }

const std::string& dataset_document(const std::string& name) {
  if (name == "suzanne") return detail::kSuzanneDocument;
  if (name == "frank") return detail::kFrankDocument;
  throw ValidationError("unknown dataset '" + name + "' (suzanne|frank)");
}

Trajectory bundled_trajectory(const std::string& name) {
  return parse_trajectory(dataset_document(name));
}

std::vector<MultiplierRow> multiplier_table(const Trajectory& t) {
  validate_trajectory(t);
  std::vector<MultiplierRow> rows;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const auto& r = t.rounds[i];
    if (!r.offer) continue;
    MultiplierRow row;
    row.round = static_cast<int>(i) + 1;
    row.offer = *r.offer;
    double sum = 0.0;
    for (Money v : r.remaining) sum += v;
    row.mean = sum / static_cast<double>(r.remaining.size());
    row.multiplier = row.offer / row.mean;
    rows.push_back(row);
  }
  return rows;
}

MultiplierSchedule calibrate_multipliers(const Trajectory& t, Extrapolation extrapolation) {
  const auto rows = multiplier_table(t);
  MultiplierSchedule schedule;
  schedule.extrapolation = extrapolation;
  if (rows.empty()) return schedule;
  const int last = rows.back().round;
  schedule.multipliers.assign(last, rows.front().multiplier);
  std::size_t next = 0;
  double current = rows.front().multiplier;
  for (int r = 1; r <= last; ++r) {
    if (next < rows.size() && rows[next].round == r) current = rows[next++].multiplier;
    schedule.multipliers[r - 1] = current;
  }
  return schedule;
}

CaseStudy replicate_case_study(const Trajectory& t, const InversionOptions& options) {
  CaseStudy c;
  c.trajectory = t;
  c.multipliers = multiplier_table(t);
  c.schedule = calibrate_multipliers(t);
  c.bounds = infer_gamma_bounds(t, c.schedule, options);

  if (!c.bounds.flagged_rounds.empty() && !c.bounds.intersection.empty()) {
    BenefitFinding f;
    f.round = c.bounds.flagged_rounds.back();
    const auto& r = t.rounds[f.round - 1];
    f.gamma = c.bounds.intersection.back().hi;
    f.offer = *r.offer;
    f.prizes = r.remaining;
    std::sort(f.prizes.begin(), f.prizes.end());
    try {
      f.benefit = enjoyment_benefit(f.offer, f.prizes, f.gamma);
    } catch (const UnboundedError&) {
      f.benefit.reset();
    }
    c.benefit = std::move(f);
  }

  c.figure_gammas = kFigureGammas;
  c.figure = action_value_series(c.schedule, t, c.figure_gammas, c.bounds.first_round - 1,
                                 options.thresholds.limits);
  return c;
}

CaseStudy replicate_case_study(const std::string& dataset, const InversionOptions& options) {
  return replicate_case_study(bundled_trajectory(dataset), options);
}

Json to_json(const CaseStudy& c) {
  Json multipliers = Json::array();
  for (const auto& m : c.multipliers)
    multipliers.push_back(Json{{"round", m.round},
                               {"offer", m.offer},
                               {"mean", m.mean},
                               {"multiplier", m.multiplier}});
  Json thresholds = Json::array();
  for (const auto& r : c.bounds.per_round) {
    Json p = to_json(r.policy);
    Json entry{{"round", r.round}};
    entry.insert(p.begin(), p.end());
    thresholds.push_back(std::move(entry));
  }
  Json benefit = nullptr;
  if (c.benefit) {
    benefit = Json{{"round", c.benefit->round},
                   {"gamma", c.benefit->gamma},
                   {"offer", c.benefit->offer},
                   {"prizes", c.benefit->prizes},
                   {"b", c.benefit->benefit ? Json(*c.benefit->benefit) : Json(nullptr)}};
  }
  Json figure = Json::array();
  for (const auto& row : c.figure)
    figure.push_back(Json{{"round", row.round},
                          {"gamma", row.gamma},
                          {"deal_value", row.deal_value},
                          {"continuation_ce", row.continuation_ce}});
  return Json{{"contestant", c.trajectory.contestant},
              {"currency", c.trajectory.currency},
              {"banker", to_json(BankerModel{c.schedule})},
              {"multipliers", std::move(multipliers)},
              {"thresholds", std::move(thresholds)},
              {"bounds", to_json(c.bounds)},
              {"benefit", std::move(benefit)},
              {"figure_gammas", c.figure_gammas},
              {"figure", std::move(figure)}};
}

}  // namespace dond
