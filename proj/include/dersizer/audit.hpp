#pragma once

// Re-evaluates every model constraint and cost term directly from a
// SizingSolution. Shares no row-generation code with the builder.

#include <string>
#include <vector>

#include "dersizer/data_model.hpp"
#include "dersizer/finance.hpp"
#include "dersizer/model.hpp"

namespace dersizer {

struct AuditViolation {
  std::string family;  // row family label, or bounds/binary/complementarity/objective
  int scenario = -1;
  int interval = -1;
  double residual = 0.0;  // violation amount divided by max(1, |rhs|)
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  double max_residual = 0.0;
  double objective_recomputed = 0.0;
  double objective_delta = 0.0;
  CostBreakdown costs;
  long checks = 0;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

inline constexpr double kAuditTolerance = 1e-6;

/// Throws AuditError when the solution lacks dispatch blocks for `set`.
AuditReport check_solution(const SizingSolution& solution, const ScenarioSet& set,
                           const DeviceCatalog& catalog, const TariffPlan& tariff,
                           double tol = kAuditTolerance);

CostBreakdown recompute_cost_breakdown(const SizingSolution& solution, const ScenarioSet& set,
                                       const DeviceCatalog& catalog, const TariffPlan& tariff);

}  // namespace dersizer
