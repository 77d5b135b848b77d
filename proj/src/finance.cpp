#include "dersizer/finance.hpp"

#include <fmt/format.h>

#include <cmath>

#include "dersizer/errors.hpp"

namespace dersizer {
namespace {

double sum(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += v;
  return acc;
}

}  // namespace

double capital_recovery_factor(double rate, int years) {
  if (years < 1) throw ValidationError("capital_recovery_factor: years must be >= 1");
  if (rate < 0.0) throw ValidationError("capital_recovery_factor: rate must be >= 0");
  if (rate == 0.0) return 1.0 / years;
  const double growth = std::pow(1.0 + rate, years);
  return rate * growth / (growth - 1.0);
}

double investment_cost(const Capacities& x, const DeviceCatalog& c) {
  return c.c_pv * x.pv + c.c_es * x.es + c.c_ic * x.ic + c.c_inv * x.inv + c.c_con * x.con;
}

double energy_charge(std::span<const double> grid_purchases, const TariffPlan& tariff) {
  if (grid_purchases.size() != tariff.energy_price.size()) {
    throw ValidationError(fmt::format("energy_charge: {} purchases vs {} prices",
                                      grid_purchases.size(), tariff.energy_price.size()));
  }
  double acc = 0.0;
  for (std::size_t t = 0; t < grid_purchases.size(); ++t) {
    acc += tariff.energy_price[t] * grid_purchases[t];
  }
  return acc;
}

double demand_charge(double peak_kw, const TariffPlan& tariff) {
  // Slack for solver round-off on a peak sitting at the cap.
  const double slack = 1e-6 * std::max(1.0, tariff.peak_cap);
  if (peak_kw < -slack || peak_kw > tariff.peak_cap + slack) {
    throw ValidationError(
        fmt::format("demand_charge: peak {} kW outside [0, {}]", peak_kw, tariff.peak_cap));
  }
  return tariff.demand_price * peak_kw;
}

double degradation_cost(std::span<const double> dch_ac, std::span<const double> dch_dc,
                        std::span<const double> ch_ac, std::span<const double> ch_dc,
                        const DeviceCatalog& catalog) {
  return catalog.c_deg * (sum(dch_ac) + sum(dch_dc) + sum(ch_ac) + sum(ch_dc));
}

SheddingCost shedding_cost(std::span<const double> lcl_ac, std::span<const double> lcl_dc,
                           std::span<const double> lnl_ac, std::span<const double> lnl_dc,
                           const DeviceCatalog& catalog) {
  return {catalog.voll_cl * (sum(lcl_ac) + sum(lcl_dc)),
          catalog.voll_nl * (sum(lnl_ac) + sum(lnl_dc))};
}

double annual_weight(const ScenarioSet& set, std::size_t s, CostKind kind) {
  const double scale =
      kind == CostKind::kDemand ? set.annual_demand_weight : set.annual_day_weight;
  return scale * set.days.at(s).probability;
}

double annualize_expected(const ScenarioSet& set, std::span<const double> per_day_costs,
                          CostKind kind) {
  if (per_day_costs.size() != set.days.size()) {
    throw ValidationError(fmt::format("annualize_expected: {} costs for {} scenarios",
                                      per_day_costs.size(), set.days.size()));
  }
  double expected = 0.0;
  for (std::size_t s = 0; s < per_day_costs.size(); ++s) {
    expected += set.days[s].probability * per_day_costs[s];
  }
  const double scale =
      kind == CostKind::kDemand ? set.annual_demand_weight : set.annual_day_weight;
  return scale * expected;
}

}  // namespace dersizer
