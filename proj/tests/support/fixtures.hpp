#pragma once

// Small randomized sizing inputs for tests and the acceptance runner.

#include <random>
#include <string>

#include "dersizer/data_model.hpp"

namespace dersizer::testkit {

struct TinyInputs {
  ScenarioSet set;
  DeviceCatalog catalog;
  TariffPlan tariff;
};

/// S scenarios of T hourly intervals with loads up to a few hundred kW and
/// TOU-like prices; catalog is the default one.
inline TinyInputs random_tiny(std::mt19937_64& rng, int S = 1, int T = 3) {
  std::uniform_real_distribution<double> load(20.0, 400.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> price(0.05, 0.20);
  TinyInputs in;
  in.tariff.energy_price.resize(T);
  for (double& p : in.tariff.energy_price) p = price(rng);
  in.tariff.demand_price = 10.0 + 15.0 * unit(rng);
  for (int s = 0; s < S; ++s) {
    DayScenario d;
    d.id = "day" + std::to_string(s);
    d.probability = 1.0 / S;
    Series total(T);
    for (double& v : total) v = load(rng);
    const auto c = split_loads(total, {});
    d.cl_ac = c.cl_ac;
    d.cl_dc = c.cl_dc;
    d.nl_ac = c.nl_ac;
    d.nl_dc = c.nl_dc;
    d.pv_availability.resize(T);
    for (double& v : d.pv_availability) v = unit(rng) < 0.3 ? 0.0 : unit(rng);
    in.set.days.push_back(d);
  }
  return in;
}

inline TinyInputs zero_load(int S = 1, int T = 2) {
  TinyInputs in;
  in.tariff.energy_price.assign(T, 0.1);
  for (int s = 0; s < S; ++s) {
    DayScenario d;
    d.id = "zero" + std::to_string(s);
    d.probability = 1.0 / S;
    d.cl_ac = d.cl_dc = d.nl_ac = d.nl_dc = Series(T, 0.0);
    d.pv_availability = Series(T, 0.5);
    in.set.days.push_back(d);
  }
  return in;
}

}  // namespace dersizer::testkit
