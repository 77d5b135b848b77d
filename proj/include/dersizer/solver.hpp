#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dersizer/milp_instance.hpp"

namespace dersizer {

enum class SolveStatus { kOptimal, kGapOptimal, kInfeasible, kTimeLimit, kUnbounded, kError };

const char* to_string(SolveStatus s);

enum class Backend { kReference, kExternal, kOracle };

const char* to_string(Backend b);
Backend parse_backend(const std::string& label);

struct SolveOptions {
  /// (incumbent - bound) / max(1, |incumbent|) at which branch-and-bound stops.
  double relative_gap = 1e-4;
  double time_limit = 600.0;  // seconds
  Backend backend = Backend::kReference;
  /// One line per processed node: id, bound, incumbent, gap. Null disables.
  std::ostream* node_log = nullptr;
  /// Command used by the external backend; it receives the LP file path and
  /// the solution file path as its last two arguments. Empty means
  /// $DERSIZER_EXTERNAL_SOLVER, then the bundled HiGHS wrapper.
  std::string external_command;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  std::vector<double> values;
  double best_bound = 0.0;
  double achieved_gap = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  long lp_solves = 0;
  double wall_seconds = 0.0;
  /// Improving direction when status is kUnbounded.
  std::vector<double> ray;
  std::string message;

  bool has_solution() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kGapOptimal ||
           (status == SolveStatus::kTimeLimit && !values.empty());
  }
};

/// Continuous relaxation of `instance` (integrality dropped).
SolveResult solve_lp(const MilpInstance& instance);

/// Solves with the backend selected in `options`.
SolveResult solve_milp(const MilpInstance& instance, const SolveOptions& options = {});

/// Reference branch-and-bound: best-bound node selection, deeper node first on
/// equal bounds, most-fractional branching, warm-started dual simplex.
SolveResult branch_and_bound(const MilpInstance& instance, const SolveOptions& options);

inline constexpr std::size_t kOracleMaxBinaries = 16;

/// Enumerates every 0/1 assignment of the binary columns and keeps the best
/// LP. Refuses instances with more than kOracleMaxBinaries binaries.
SolveResult oracle_enumerate(const MilpInstance& instance);

/// Writes the instance as an LP file, runs an external MILP solver and reads
/// its solution back. Status kError when the solver is unavailable.
SolveResult solve_external(const MilpInstance& instance, const SolveOptions& options);

}  // namespace dersizer
