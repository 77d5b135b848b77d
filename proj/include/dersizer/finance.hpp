#pragma once

// Scalar cost arithmetic shared by the objective builder, the audit and the
// report. Per-day costs are in $, annualized costs in $/yr.

#include <span>

#include "dersizer/data_model.hpp"

namespace dersizer {

struct Capacities {
  double pv = 0.0;
  double es = 0.0;
  double ic = 0.0;
  double inv = 0.0;
  double con = 0.0;
};

struct CostBreakdown {
  double investment = 0.0;
  double energy_charges = 0.0;
  double demand_charges = 0.0;
  double degradation = 0.0;
  double shed_critical = 0.0;
  double shed_noncritical = 0.0;
  double total = 0.0;

  double sum_of_components() const {
    return investment + energy_charges + demand_charges + degradation + shed_critical +
           shed_noncritical;
  }
  /// Electricity bill (energy plus demand charges).
  double payment() const { return energy_charges + demand_charges; }
};

enum class CostKind { kEnergy, kDemand, kDegradation, kShedding };

/// r(1+r)^n / ((1+r)^n - 1); 1/n when r == 0.
double capital_recovery_factor(double rate, int years);

double investment_cost(const Capacities& x, const DeviceCatalog& catalog);

/// One scenario-day: sum_t price_t * purchase_t.
double energy_charge(std::span<const double> grid_purchases, const TariffPlan& tariff);

/// One scenario-day: demand price times the day's peak. Throws ValidationError
/// when the peak is negative or exceeds the tariff cap.
double demand_charge(double peak_kw, const TariffPlan& tariff);

double degradation_cost(std::span<const double> dch_ac, std::span<const double> dch_dc,
                        std::span<const double> ch_ac, std::span<const double> ch_dc,
                        const DeviceCatalog& catalog);

struct SheddingCost {
  double critical = 0.0;
  double noncritical = 0.0;
};

SheddingCost shedding_cost(std::span<const double> lcl_ac, std::span<const double> lcl_dc,
                           std::span<const double> lnl_ac, std::span<const double> lnl_dc,
                           const DeviceCatalog& catalog);

/// Probability-weighted expectation of one per-day cost, scaled to a year.
double annualize_expected(const ScenarioSet& set, std::span<const double> per_day_costs,
                          CostKind kind);

/// Weight that turns a per-day $ amount of scenario s into $/yr.
double annual_weight(const ScenarioSet& set, std::size_t s, CostKind kind);

}  // namespace dersizer
