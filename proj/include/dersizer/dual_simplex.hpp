#pragma once

// Bounded-variable dual simplex over a sparse LU basis factorization.
//
// The LP is  min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
// Internally every row gets a logical s = -(A x), so the working system is
// [A I] (x, s) = 0 and the all-logical basis is the identity. Infinite
// bounds are replaced by finite working bounds (implied activity bounds for
// logicals, a large artificial box for structurals), which makes every
// variable boxed: any basis can be made dual feasible by bound flips, so no
// primal phase 1 is ever needed. A structural that finishes on its
// artificial box signals an unbounded LP.

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dersizer {
class MilpInstance;
}

namespace dersizer::lp {

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kTimeLimit, kNumericalError };

const char* to_string(Status s);

/// Column-compressed LP data.
struct Problem {
  int num_cols = 0;
  int num_rows = 0;
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  std::vector<int> col_start;  // size num_cols + 1
  std::vector<int> row_index;
  std::vector<double> value;

  /// Continuous relaxation of a MILP instance.
  static Problem from_instance(const MilpInstance& instance);
};

struct Tolerances {
  double primal = 1e-7;  // scaled by max(1, |bound|)
  double dual = 1e-7;    // scaled by max(1, max|c| * 1e-2)
  double pivot = 1e-9;
  int refactor_interval = 100;
  long iteration_limit = 5'000'000;
};

using Clock = std::chrono::steady_clock;

class DualSimplex {
 public:
  explicit DualSimplex(Problem problem, Tolerances tol = {});
  ~DualSimplex();
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;
  DualSimplex(const DualSimplex&) = delete;
  DualSimplex& operator=(const DualSimplex&) = delete;

  int num_cols() const { return problem_.num_cols; }
  int num_rows() const { return problem_.num_rows; }

  void set_col_bounds(int j, double lower, double upper);
  double col_lower(int j) const { return problem_.col_lower[j]; }
  double col_upper(int j) const { return problem_.col_upper[j]; }

  /// Solves from `warm` when given and usable, otherwise from the slack basis.
  Status solve(const std::vector<VarStatus>* warm = nullptr,
               Clock::time_point deadline = Clock::time_point::max());

  Status status() const { return status_; }
  double objective() const;
  std::vector<double> col_values() const;
  std::vector<double> row_activities() const;
  /// Reduced costs of the structural columns at the last basis.
  std::vector<double> reduced_costs() const;
  /// Basis statuses for structurals followed by logicals.
  const std::vector<VarStatus>& basis() const { return status_of_; }
  /// Improving direction in structural space when the LP is unbounded.
  const std::vector<double>& ray() const { return ray_; }
  long iterations() const { return iterations_; }
  long total_iterations() const { return total_iterations_; }
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  struct Factor;

  int total_vars() const { return problem_.num_cols + problem_.num_rows; }
  void setup_working_bounds();
  void slack_basis();
  bool load_basis(const std::vector<VarStatus>& warm);
  bool refactor();
  void place_nonbasic(int j);
  void compute_primal();
  void compute_duals();
  int fix_dual_infeasibilities();
  int choose_leaving(bool bland) const;
  void compute_pivot_row(const std::vector<double>& rho);
  int ratio_test(double direction, bool bland) const;
  double infeasibility(int var) const;
  double primal_tol(double bound) const;
  void detect_unbounded();
  void column(int j, std::vector<double>& dense) const;

  Problem problem_;
  Tolerances tol_;
  std::vector<int> row_start_;  // row-major copy of A
  std::vector<int> row_col_;
  std::vector<double> row_val_;

  // working state over structurals (0..n-1) and logicals (n..n+m-1)
  std::vector<double> lo_, up_, cost_, x_, d_;
  std::vector<bool> artificial_lo_, artificial_up_;
  std::vector<VarStatus> status_of_;
  std::vector<int> head_;  // basic variable in each row position
  std::vector<double> weight_;  // dual steepest-edge weights per row position
  std::unique_ptr<Factor> factor_;

  // scratch
  std::vector<double> alpha_row_;
  std::vector<int> touched_;
  std::vector<char> is_touched_;

  double dual_tol_ = 1e-7;
  double big_ = 1e7;
  Status status_ = Status::kNumericalError;
  long iterations_ = 0;
  long total_iterations_ = 0;
  std::vector<double> ray_;
  std::string diagnostics_;
};

}  // namespace dersizer::lp
