#pragma once

// Deterministic synthetic commercial-building year: a flat data-center base
// load, weekday office load that grows with summer cooling, and a clear-sky
// PV availability curve thinned by daily cloudiness.

#include <cstdint>

#include "dersizer/data_model.hpp"

namespace dersizer {

struct SyntheticSpec {
  int year = 2021;
  double peak_kw = 846.0;
  double base_kw = 330.0;
  double latitude_deg = 37.5;
  std::uint64_t seed = 20210101;
};

/// Hourly profile for every day of `spec.year`. The load maximum equals
/// spec.peak_kw exactly; PV availability lies in [0, 1]. Bit-identical across
/// platforms for a given spec.
AnnualProfile synthetic_building_year(const SyntheticSpec& spec = {});

}  // namespace dersizer
