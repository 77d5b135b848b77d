#pragma once

// Sizing model: builds the MILP for one case and maps solver output back to
// capacities and dispatch schedules.

#include <string>
#include <vector>

#include "dersizer/data_model.hpp"
#include "dersizer/finance.hpp"
#include "dersizer/milp_instance.hpp"
#include "dersizer/solver.hpp"

namespace dersizer {

/// Which resources may be installed. Converters are always sized.
struct CaseSpec {
  bool allow_pv = true;
  bool allow_es = true;

  /// 0: grid only, 1: PV, 2: storage, 3: PV and storage.
  static CaseSpec from_index(int index);
  int index() const { return (allow_pv ? 1 : 0) + (allow_es ? 2 : 0); }
};

enum class SocBoundary {
  kCyclic,         // initial SoC is free and must equal the final SoC
  kFixedFraction,  // initial SoC = fraction * rho * x_es
};

struct ModelOptions {
  SocBoundary soc_boundary = SocBoundary::kCyclic;
  double initial_soc_fraction = 0.5;
};

struct BigM {
  double m_flow = 0.0;  // kW, interfacing-converter flow switch
  double m_es = 0.0;    // kW, storage product linearization
};

/// Row families of the sizing model. Stored in Row::family.
enum class RowFamily : int {
  kUntagged = 0,
  kAcBalance,
  kDcBalance,
  kIcCoupling,
  kIcInSwitch,
  kIcOutSwitch,
  kSocMin,
  kSocMax,
  kSocTransition,
  kSocBoundary,
  kPvAvailable,
  kPeakTracking,
  kIslAcBalance,
  kIslDcBalance,
  kIslIcCoupling,
  kIslIcInSwitch,
  kIslIcOutSwitch,
  kIslPvAvailable,
  kIslDchPower,
  kIslDchEnergy,
  kInvGrid,
  kInvIsl,
  kConGrid,
  kConIsl,
  kIcGridIn,
  kIcGridOut,
  kIcIslIn,
  kIcIslOut,
  kAuxDefinition,
  kAuxOn,
  kAuxOff,
  kDchLimit,
  kChLimit,
};

const char* to_string(RowFamily f);

/// m_es = ES cap. m_flow is the larger of (max total load + PV cap * eta_con
/// + ES cap * eta_dch) and the tightest flows the buses can physically carry.
BigM compute_big_m(const ScenarioSet& set, const DeviceCatalog& catalog);

/// Column and row counts the builder produces for S scenarios, T intervals.
struct ModelDimensions {
  long columns = 0;
  long rows = 0;
  long binaries = 0;
};
ModelDimensions model_dimensions(std::size_t scenarios, std::size_t intervals, CaseSpec c);

/// Throws BuildError on inconsistent dimensions or nonpositive efficiencies.
MilpInstance build_model(const ScenarioSet& set, const DeviceCatalog& catalog,
                         const TariffPlan& tariff, CaseSpec case_spec,
                         const ModelOptions& options = {});

struct ProductColumns {
  int u = -1;
  int kappa = -1;
  std::vector<int> rows;
};

/// Adds u and kappa with u = x - kappa, u <= m*y, kappa <= m*(1-y), so that
/// u = x*y at every point with y binary. Throws BuildError if m is below the
/// upper bound of x.
ProductColumns linearize_product(MilpInstance& instance, int x_col, int y_col, double m,
                                 const SymbolKey& u_key, const SymbolKey& kappa_key,
                                 const std::string& suffix);

/// Grid-connected schedule of one scenario day.
struct GridDispatch {
  double peak = 0.0;
  double soc_init = 0.0;
  Series p_grid, v_dc, f_ac, f_dcin, f_dcout, z_dc;
  Series dch_ac, dch_dc, ch_ac, ch_dc, soc, y_es, u_es, kappa_es;
};

/// One-interval islanding contingency at each interval of a scenario day.
struct IslandDispatch {
  Series vi_dc, dchi_ac, dchi_dc, fi_ac, fi_dcin, fi_dcout, zi_dc;
  Series lcl_ac, lcl_dc, lnl_ac, lnl_dc;
};

struct ScenarioDispatch {
  std::string id;
  GridDispatch grid;
  IslandDispatch island;
};

struct SizingSolution {
  CaseSpec case_spec;
  ModelOptions options;
  BigM big_m;
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  double achieved_gap = 0.0;
  Capacities capacities;
  std::vector<ScenarioDispatch> scenarios;
  CostBreakdown costs;

  bool feasible() const { return !scenarios.empty(); }
};

/// Maps solver output onto capacities and dispatch. Columns a case does not
/// build read as zero. An infeasible result yields an empty solution; an
/// unbounded or failed solve throws SolverError.
SizingSolution extract_solution(const MilpInstance& instance, const SolveResult& result,
                                const ScenarioSet& set, const DeviceCatalog& catalog,
                                const TariffPlan& tariff, CaseSpec case_spec,
                                const ModelOptions& options = {});

/// Costs of a solution assembled from its dispatch series.
CostBreakdown cost_breakdown(const SizingSolution& solution, const ScenarioSet& set,
                             const DeviceCatalog& catalog, const TariffPlan& tariff);

}  // namespace dersizer
