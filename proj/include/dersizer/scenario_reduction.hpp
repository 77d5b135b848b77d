#pragma once

// Picks k representative calendar days (medoids) from an hourly annual
// profile and weights each by the share of days closest to it.

#include <cstddef>
#include <iosfwd>
#include <string>

#include "dersizer/data_model.hpp"

namespace dersizer {

struct ReductionConfig {
  std::size_t k = 6;
  /// Append the day's PV availability to the load vector when measuring distance.
  bool include_pv = false;
  /// Distance on globally z-scored series (true) or on raw values.
  bool normalize = true;
  std::string method = "greedy-medoids";
};

/// Greedy forward selection: each step adds the day that most reduces the
/// summed distance from every day to its nearest chosen day. Ties go to the
/// earliest calendar day, both when selecting and when assigning days.
/// Throws ConfigError when k is zero or exceeds the whole days available.
ScenarioSet reduce_scenarios(const AnnualProfile& annual, const ReductionConfig& cfg,
                             const LoadSplitSpec& split);

/// Mean Euclidean distance (kW) between each day's load vector and the
/// nearest representative's load vector.
double reconstruction_error(const AnnualProfile& annual, const ScenarioSet& set);

/// Writes "day_index,probability" rows, one per representative.
void write_reduction_csv(std::ostream& out, const ScenarioSet& set);

}  // namespace dersizer
