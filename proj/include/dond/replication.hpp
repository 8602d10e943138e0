#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dond/banker.hpp"
#include "dond/inversion.hpp"
#include "dond/json_io.hpp"
#include "dond/solver.hpp"
#include "dond/trajectory.hpp"

namespace dond {

/// Parses and validates a trajectory document.
Trajectory parse_trajectory(const std::string& document);
Trajectory load_trajectory(const std::string& path);

/// Names of the bundled datasets ("suzanne", "frank").
std::vector<std::string> dataset_names();
/// Raw JSON text of a bundled dataset; throws ValidationError if unknown.
const std::string& dataset_document(const std::string& name);
Trajectory bundled_trajectory(const std::string& name);

struct MultiplierRow {
  int round = 0;  // 1-based
  Money offer = 0.0;
  Money mean = 0.0;
  double multiplier = 0.0;
};

std::vector<MultiplierRow> multiplier_table(const Trajectory& t);

/// m_round = observed offer / mean of remaining prizes for every round with
/// an offer. Rounds without an offer copy the nearest earlier multiplier
/// (or the first observed one).
MultiplierSchedule calibrate_multipliers(const Trajectory& t,
                                         Extrapolation extrapolation = Extrapolation::HoldLast);

struct BenefitFinding {
  int round = 0;
  double gamma = 0.0;
  Money offer = 0.0;
  std::vector<Money> prizes;
  std::optional<Money> benefit;  // empty when no finite bonus exists below the cap
};

struct CaseStudy {
  Trajectory trajectory;
  MultiplierSchedule schedule;
  std::vector<MultiplierRow> multipliers;
  BoundsReport bounds;
  std::optional<BenefitFinding> benefit;
  std::vector<double> figure_gammas;
  std::vector<SeriesRow> figure;
};

inline const std::vector<double> kFigureGammas{0.0, 0.5, 1.0, 1.54085, 2.5};

CaseStudy replicate_case_study(const Trajectory& t, const InversionOptions& options = {});
CaseStudy replicate_case_study(const std::string& dataset, const InversionOptions& options = {});

Json to_json(const CaseStudy& c);

}  // namespace dond
