#pragma once

// End-to-end study: profile -> representative days -> one MILP per case ->
// solve -> audit -> CSV and text reports.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dersizer/audit.hpp"
#include "dersizer/data_model.hpp"
#include "dersizer/model.hpp"
#include "dersizer/scenario_reduction.hpp"
#include "dersizer/solver.hpp"

namespace dersizer {

struct StudyConfig {
  std::filesystem::path profile;
  std::filesystem::path output_dir = "out";
  std::vector<int> cases{0, 1, 2, 3};
  ReductionConfig reduction;
  LoadSplitSpec split;
  DeviceCatalog catalog;
  TariffPlan tariff = TariffPlan::default_tou();
  double annual_day_weight = 365.0;
  double annual_demand_weight = 12.0;
  ModelOptions model;
  SolveOptions solve;
  /// Write each case's model as an LP file next to the results.
  bool write_lp = false;
};

/// Reads a JSON study file. Relative paths resolve against the file's
/// directory. Throws ConfigError on malformed or unknown keys.
StudyConfig load_study_config(const std::filesystem::path& path);
StudyConfig parse_study_config(const std::string& json_text,
                               const std::filesystem::path& base_dir);

/// Checks the config itself and everything it references (profile, k,
/// catalog, tariff, split). Never throws for content problems.
ValidationReport validate_study_config(const StudyConfig& cfg);

struct CaseOutcome {
  int case_index = 0;
  SolveResult solve;
  SizingSolution solution;
  std::optional<AuditReport> audit;
  std::string error;  // build or extraction failure

  bool solved() const;
};

enum ExitCode : int { kExitOk = 0, kExitSolveFailure = 1, kExitAuditViolation = 2, kExitConfigError = 3 };

struct StudyOutcome {
  ScenarioSet scenarios;
  double reconstruction_error = 0.0;
  std::vector<CaseOutcome> cases;  // ascending case index
  int exit_code = kExitOk;
};

/// Runs every requested case (concurrently) and writes results.csv,
/// savings.csv, scenarios.csv, report.txt and per-case dispatch, curtailment
/// and audit files into cfg.output_dir. `log` receives progress lines.
StudyOutcome run_study(const StudyConfig& cfg, std::ostream* log = nullptr);

/// Percent-style savings (fractions) of each case against case 0, per cost
/// component; nullopt where the case-0 cost is zero.
struct SavingsTable {
  std::vector<std::string> components;
  std::map<int, std::vector<std::optional<double>>> by_case;
};

SavingsTable compare_cases(const std::map<int, CostBreakdown>& results);

double savings_fraction(double base, double value);

/// Writers used by run_study; exposed for tests.
void write_results_csv(std::ostream& out, const std::vector<CaseOutcome>& cases,
                       const ScenarioSet& set);
void write_savings_csv(std::ostream& out, const SavingsTable& table);
void write_dispatch_csv(std::ostream& out, const ScenarioDispatch& d);
void write_curtailment_csv(std::ostream& out, const SizingSolution& s);

}  // namespace dersizer
