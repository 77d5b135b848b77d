#include "dersizer/dual_simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <cmath>

#include "dersizer/errors.hpp"
#include "dersizer/milp_instance.hpp"

namespace dersizer::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration-limit";
    case Status::kTimeLimit: return "time-limit";
    case Status::kNumericalError: return "numerical-error";
  }
  return "?";
}

Problem Problem::from_instance(const MilpInstance& instance) {
  Problem p;
  p.num_cols = static_cast<int>(instance.num_columns());
  p.num_rows = static_cast<int>(instance.num_rows());
  for (const auto& c : instance.columns()) {
    p.cost.push_back(c.cost);
    p.col_lower.push_back(c.lower);
    p.col_upper.push_back(c.upper);
  }
  std::vector<int> count(p.num_cols, 0);
  for (const auto& r : instance.rows()) {
    switch (r.sense) {
      case RowSense::kLe: p.row_lower.push_back(-kInf); p.row_upper.push_back(r.rhs); break;
      case RowSense::kGe: p.row_lower.push_back(r.rhs); p.row_upper.push_back(kInf); break;
      case RowSense::kEq: p.row_lower.push_back(r.rhs); p.row_upper.push_back(r.rhs); break;
    }
    for (int j : r.index) ++count[j];
  }
  p.col_start.assign(p.num_cols + 1, 0);
  for (int j = 0; j < p.num_cols; ++j) p.col_start[j + 1] = p.col_start[j] + count[j];
  p.row_index.resize(p.col_start.back());
  p.value.resize(p.col_start.back());
  std::vector<int> fill(p.col_start.begin(), p.col_start.end() - 1);
  for (int i = 0; i < p.num_rows; ++i) {
    const auto& r = instance.rows()[i];
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      const int pos = fill[r.index[k]]++;
      p.row_index[pos] = i;
      p.value[pos] = r.value[k];
    }
  }
  return p;
}

// LU of the basis plus a product-form eta file for the updates since the
// last factorization.
struct DualSimplex::Factor {
  using SpMat = Eigen::SparseMatrix<double>;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> idx;
    std::vector<double> val;
  };
  std::vector<Eta> etas;
  Eigen::VectorXd in, out;

  bool factorize(const SpMat& basis) {
    etas.clear();
    lu.analyzePattern(basis);
    lu.factorize(basis);
    return lu.info() == Eigen::Success;
  }

  void ftran(std::vector<double>& v) {
    in = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    out = lu.solve(in);
    std::copy(out.data(), out.data() + out.size(), v.begin());
    for (const auto& e : etas) {
      const double vr = v[e.row] / e.pivot;
      v[e.row] = vr;
      if (vr == 0.0) continue;
      for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * vr;
    }
  }

  void btran(std::vector<double>& v) {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double s = v[it->row];
      for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
      v[it->row] = s / it->pivot;
    }
    in = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    out = lu.transpose().solve(in);
    std::copy(out.data(), out.data() + out.size(), v.begin());
  }

  void push(int row, const std::vector<double>& col) {
    Eta e;
    e.row = row;
    e.pivot = col[row];
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (static_cast<int>(i) != row && std::abs(col[i]) > 1e-14) {
        e.idx.push_back(static_cast<int>(i));
        e.val.push_back(col[i]);
      }
    }
    etas.push_back(std::move(e));
  }
};

DualSimplex::DualSimplex(Problem problem, Tolerances tol)
    : problem_(std::move(problem)), tol_(tol), factor_(std::make_unique<Factor>()) {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  if (static_cast<int>(problem_.col_start.size()) != n + 1 ||
      static_cast<int>(problem_.cost.size()) != n ||
      static_cast<int>(problem_.row_lower.size()) != m) {
    throw SolverError("malformed LP problem dimensions");
  }
  // Row-major copy for pivot-row computation.
  std::vector<int> count(m, 0);
  for (int i : problem_.row_index) ++count[i];
  row_start_.assign(m + 1, 0);
  for (int i = 0; i < m; ++i) row_start_[i + 1] = row_start_[i] + count[i];
  row_col_.resize(row_start_.back());
  row_val_.resize(row_start_.back());
  std::vector<int> fill(row_start_.begin(), row_start_.end() - 1);
  for (int j = 0; j < n; ++j) {
    for (int k = problem_.col_start[j]; k < problem_.col_start[j + 1]; ++k) {
      const int pos = fill[problem_.row_index[k]]++;
      row_col_[pos] = j;
      row_val_[pos] = problem_.value[k];
    }
  }
  double cmax = 0.0;
  for (double c : problem_.cost) cmax = std::max(cmax, std::abs(c));
  dual_tol_ = tol_.dual * std::max(1.0, cmax * 1e-2);
  status_of_.assign(n + m, VarStatus::kAtLower);
}

DualSimplex::~DualSimplex() = default;
DualSimplex::DualSimplex(DualSimplex&&) noexcept = default;
DualSimplex& DualSimplex::operator=(DualSimplex&&) noexcept = default;

void DualSimplex::set_col_bounds(int j, double lower, double upper) {
  problem_.col_lower[j] = lower;
  problem_.col_upper[j] = upper;
}

double DualSimplex::primal_tol(double bound) const {
  return tol_.primal * std::max(1.0, std::abs(bound));
}

void DualSimplex::setup_working_bounds() {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  const int N = n + m;
  lo_.assign(N, 0.0);
  up_.assign(N, 0.0);
  cost_.assign(N, 0.0);
  artificial_lo_.assign(N, false);
  artificial_up_.assign(N, false);

  double magnitude = 1.0;
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(problem_.col_lower[j])) magnitude = std::max(magnitude, std::abs(problem_.col_lower[j]));
    if (std::isfinite(problem_.col_upper[j])) magnitude = std::max(magnitude, std::abs(problem_.col_upper[j]));
  }
  for (int i = 0; i < m; ++i) {
    if (std::isfinite(problem_.row_lower[i])) magnitude = std::max(magnitude, std::abs(problem_.row_lower[i]));
    if (std::isfinite(problem_.row_upper[i])) magnitude = std::max(magnitude, std::abs(problem_.row_upper[i]));
  }
  big_ = std::max(1e7, 1e3 * magnitude);

  for (int j = 0; j < n; ++j) {
    cost_[j] = problem_.cost[j];
    lo_[j] = problem_.col_lower[j];
    up_[j] = problem_.col_upper[j];
    if (!std::isfinite(lo_[j]) && !std::isfinite(up_[j]) && cost_[j] == 0.0) {
      // free and costless: handled as a nonbasic free variable at zero
      continue;
    }
    if (!std::isfinite(lo_[j])) {
      lo_[j] = std::min(-big_, up_[j] - big_);
      artificial_lo_[j] = true;
    }
    if (!std::isfinite(up_[j])) {
      up_[j] = std::max(big_, lo_[j] + big_);
      artificial_up_[j] = true;
    }
  }
  // Logical s_i = -activity_i; infinite sides are replaced by the implied
  // activity range under the structural working bounds.
  for (int i = 0; i < m; ++i) {
    double amin = 0.0;
    double amax = 0.0;
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const int j = row_col_[k];
      const double a = row_val_[k];
      double jl = lo_[j];
      double ju = up_[j];
      if (!std::isfinite(jl)) jl = -big_;
      if (!std::isfinite(ju)) ju = big_;
      amin += a > 0 ? a * jl : a * ju;
      amax += a > 0 ? a * ju : a * jl;
    }
    const int v = n + i;
    const double rl = problem_.row_lower[i];
    const double ru = problem_.row_upper[i];
    lo_[v] = std::isfinite(ru) ? -ru : -(amax + 1.0 + 1e-3 * std::abs(amax));
    up_[v] = std::isfinite(rl) ? -rl : -(amin - 1.0 - 1e-3 * std::abs(amin));
    if (lo_[v] > up_[v]) {
      // empty implied range would mean an infeasible row; keep the stated side
      if (!std::isfinite(ru)) lo_[v] = up_[v];
      if (!std::isfinite(rl)) up_[v] = lo_[v];
    }
  }
}

void DualSimplex::place_nonbasic(int j) {
  switch (status_of_[j]) {
    case VarStatus::kAtLower: x_[j] = lo_[j]; break;
    case VarStatus::kAtUpper: x_[j] = up_[j]; break;
    case VarStatus::kFree: x_[j] = 0.0; break;
    case VarStatus::kBasic: break;
  }
}

void DualSimplex::slack_basis() {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  status_of_.assign(n + m, VarStatus::kAtLower);
  head_.resize(m);
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(lo_[j]) && !std::isfinite(up_[j])) {
      status_of_[j] = VarStatus::kFree;
    } else if (cost_[j] < 0.0) {
      status_of_[j] = VarStatus::kAtUpper;
    } else {
      status_of_[j] = VarStatus::kAtLower;
    }
  }
  for (int i = 0; i < m; ++i) {
    status_of_[n + i] = VarStatus::kBasic;
    head_[i] = n + i;
  }
  weight_.assign(m, 1.0);
}

bool DualSimplex::load_basis(const std::vector<VarStatus>& warm) {
  const int N = total_vars();
  const int m = problem_.num_rows;
  if (static_cast<int>(warm.size()) != N) return false;
  std::vector<int> head;
  head.reserve(m);
  for (int j = 0; j < N; ++j) {
    if (warm[j] == VarStatus::kBasic) head.push_back(j);
  }
  if (static_cast<int>(head.size()) != m) return false;
  status_of_ = warm;
  for (int j = 0; j < N; ++j) {
    if (status_of_[j] == VarStatus::kFree && (std::isfinite(lo_[j]) || std::isfinite(up_[j]))) {
      status_of_[j] = VarStatus::kAtLower;
    }
    if (status_of_[j] != VarStatus::kBasic && status_of_[j] != VarStatus::kFree &&
        !std::isfinite(lo_[j])) {
      status_of_[j] = VarStatus::kFree;
    }
  }
  head_ = std::move(head);
  weight_.assign(m, 1.0);
  return true;
}

void DualSimplex::column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  const int n = problem_.num_cols;
  if (j < n) {
    for (int k = problem_.col_start[j]; k < problem_.col_start[j + 1]; ++k) {
      dense[problem_.row_index[k]] += problem_.value[k];
    }
  } else {
    dense[j - n] = 1.0;
  }
}

bool DualSimplex::refactor() {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 3);
  for (int i = 0; i < m; ++i) {
    const int j = head_[i];
    if (j < n) {
      for (int k = problem_.col_start[j]; k < problem_.col_start[j + 1]; ++k) {
        trip.emplace_back(problem_.row_index[k], i, problem_.value[k]);
      }
    } else {
      trip.emplace_back(j - n, i, 1.0);
    }
  }
  Factor::SpMat basis(m, m);
  basis.setFromTriplets(trip.begin(), trip.end());
  basis.makeCompressed();
  if (m > 0 && !factor_->factorize(basis)) return false;
  compute_primal();
  compute_duals();
  return true;
}

void DualSimplex::compute_primal() {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  const int N = n + m;
  for (int j = 0; j < N; ++j) {
    if (status_of_[j] != VarStatus::kBasic) place_nonbasic(j);
  }
  if (m == 0) return;
  std::vector<double> rhs(m, 0.0);
  for (int j = 0; j < n; ++j) {
    if (status_of_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
    for (int k = problem_.col_start[j]; k < problem_.col_start[j + 1]; ++k) {
      rhs[problem_.row_index[k]] -= problem_.value[k] * x_[j];
    }
  }
  for (int i = 0; i < m; ++i) {
    const int v = n + i;
    if (status_of_[v] != VarStatus::kBasic) rhs[i] -= x_[v];
  }
  factor_->ftran(rhs);
  for (int i = 0; i < m; ++i) x_[head_[i]] = rhs[i];
}

void DualSimplex::compute_duals() {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  std::vector<double> y(m, 0.0);
  for (int i = 0; i < m; ++i) y[i] = cost_[head_[i]];
  if (m > 0) factor_->btran(y);
  for (int j = 0; j < n; ++j) {
    if (status_of_[j] == VarStatus::kBasic) {
      d_[j] = 0.0;
      continue;
    }
    double dj = cost_[j];
    for (int k = problem_.col_start[j]; k < problem_.col_start[j + 1]; ++k) {
      dj -= y[problem_.row_index[k]] * problem_.value[k];
    }
    d_[j] = dj;
  }
  for (int i = 0; i < m; ++i) {
    const int v = n + i;
    d_[v] = status_of_[v] == VarStatus::kBasic ? 0.0 : -y[i];
  }
}

int DualSimplex::fix_dual_infeasibilities() {
  int flips = 0;
  const int N = total_vars();
  for (int j = 0; j < N; ++j) {
    switch (status_of_[j]) {
      case VarStatus::kAtLower:
        if (d_[j] < -dual_tol_ && lo_[j] != up_[j]) {
          status_of_[j] = VarStatus::kAtUpper;
          ++flips;
        }
        break;
      case VarStatus::kAtUpper:
        if (d_[j] > dual_tol_ && lo_[j] != up_[j]) {
          status_of_[j] = VarStatus::kAtLower;
          ++flips;
        }
        break;
      case VarStatus::kFree:
        if (std::abs(d_[j]) > dual_tol_) {
          lo_[j] = -big_;
          up_[j] = big_;
          artificial_lo_[j] = artificial_up_[j] = true;
          status_of_[j] = d_[j] > 0 ? VarStatus::kAtLower : VarStatus::kAtUpper;
          ++flips;
        }
        break;
      case VarStatus::kBasic: break;
    }
  }
  return flips;
}

double DualSimplex::infeasibility(int var) const {
  const double v = x_[var];
  if (v < lo_[var] - primal_tol(lo_[var])) return v - lo_[var];
  if (v > up_[var] + primal_tol(up_[var])) return v - up_[var];
  return 0.0;
}

int DualSimplex::choose_leaving(bool bland) const {
  const int m = problem_.num_rows;
  int best = -1;
  double best_score = 0.0;
  for (int i = 0; i < m; ++i) {
    const double delta = infeasibility(head_[i]);
    if (delta == 0.0) continue;
    if (bland) {
      if (best < 0 || head_[i] < head_[best]) best = i;
      continue;
    }
    const double score = delta * delta / weight_[i];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

void DualSimplex::compute_pivot_row(const std::vector<double>& rho) {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  for (int j : touched_) {
    alpha_row_[j] = 0.0;
    is_touched_[j] = 0;
  }
  touched_.clear();
  for (int i = 0; i < m; ++i) {
    const double r = rho[i];
    if (std::abs(r) < 1e-14) continue;
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const int j = row_col_[k];
      if (status_of_[j] == VarStatus::kBasic) continue;
      if (!is_touched_[j]) {
        is_touched_[j] = 1;
        touched_.push_back(j);
      }
      alpha_row_[j] += r * row_val_[k];
    }
    const int v = n + i;
    if (status_of_[v] != VarStatus::kBasic) {
      if (!is_touched_[v]) {
        is_touched_[v] = 1;
        touched_.push_back(v);
      }
      alpha_row_[v] += r;
    }
  }
}

int DualSimplex::ratio_test(double direction, bool bland) const {
  // direction > 0: leaving variable is above its upper bound and decreases
  // to it; direction < 0: below its lower bound.
  auto eligible = [&](int j, double& slack, double& mag) {
    const double a = alpha_row_[j];
    mag = std::abs(a);
    if (mag <= tol_.pivot) return false;
    switch (status_of_[j]) {
      case VarStatus::kAtLower:
        if (lo_[j] == up_[j] || direction * a <= 0.0) return false;
        slack = d_[j];
        return true;
      case VarStatus::kAtUpper:
        if (lo_[j] == up_[j] || direction * a >= 0.0) return false;
        slack = -d_[j];
        return true;
      case VarStatus::kFree:
        slack = std::abs(d_[j]);
        return true;
      case VarStatus::kBasic: return false;
    }
    return false;
  };

  int best = -1;
  if (bland) {
    double best_ratio = kInf;
    for (int j : touched_) {
      double slack = 0.0;
      double mag = 0.0;
      if (!eligible(j, slack, mag)) continue;
      const double ratio = std::max(slack, 0.0) / mag;
      if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && (best < 0 || j < best))) {
        if (ratio < best_ratio) best_ratio = ratio;
        best = j;
      }
    }
    return best;
  }

  // Harris two-pass.
  double bound = kInf;
  for (int j : touched_) {
    double slack = 0.0;
    double mag = 0.0;
    if (!eligible(j, slack, mag)) continue;
    bound = std::min(bound, (slack + dual_tol_) / mag);
  }
  if (bound == kInf) return -1;
  double best_mag = 0.0;
  for (int j : touched_) {
    double slack = 0.0;
    double mag = 0.0;
    if (!eligible(j, slack, mag)) continue;
    if (slack / mag <= bound && (mag > best_mag || (mag == best_mag && j < best))) {
      best_mag = mag;
      best = j;
    }
  }
  return best;
}

void DualSimplex::detect_unbounded() {
  const int n = problem_.num_cols;
  ray_.clear();
  int hit = -1;
  for (int j = 0; j < n && hit < 0; ++j) {
    const bool at_art_lo = artificial_lo_[j] && x_[j] <= lo_[j] + 1e-6 * big_;
    const bool at_art_up = artificial_up_[j] && x_[j] >= up_[j] - 1e-6 * big_;
    if (at_art_lo || at_art_up) hit = j;
  }
  if (hit < 0) return;
  status_ = Status::kUnbounded;
  diagnostics_ = fmt::format("column {} reached its artificial bound", hit);

  // Improving direction of the recession cone, boxed to [-1, 1].
  Problem cone = problem_;
  for (int j = 0; j < n; ++j) {
    cone.col_lower[j] = std::isfinite(problem_.col_lower[j]) ? 0.0 : -1.0;
    cone.col_upper[j] = std::isfinite(problem_.col_upper[j]) ? 0.0 : 1.0;
  }
  for (int i = 0; i < problem_.num_rows; ++i) {
    cone.row_lower[i] = std::isfinite(problem_.row_lower[i]) ? 0.0 : -std::numeric_limits<double>::infinity();
    cone.row_upper[i] = std::isfinite(problem_.row_upper[i]) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  DualSimplex sub(std::move(cone), tol_);
  if (sub.solve() == Status::kOptimal && sub.objective() < -tol_.primal) {
    ray_ = sub.col_values();
  }
}

Status DualSimplex::solve(const std::vector<VarStatus>* warm, Clock::time_point deadline) {
  const int n = problem_.num_cols;
  const int m = problem_.num_rows;
  const int N = n + m;
  iterations_ = 0;
  ray_.clear();
  diagnostics_.clear();
  setup_working_bounds();
  x_.assign(N, 0.0);
  d_.assign(N, 0.0);
  alpha_row_.assign(N, 0.0);
  is_touched_.assign(N, 0);
  touched_.clear();

  if (!(warm && load_basis(*warm) && refactor())) {
    slack_basis();
    if (!refactor()) {
      status_ = Status::kNumericalError;
      diagnostics_ = "slack basis factorization failed";
      return status_;
    }
  }
  if (fix_dual_infeasibilities() > 0) compute_primal();

  std::vector<double> rho(m), col(m), tau(m);
  int cleanup_rounds = 0;
  int failed_pivots = 0;
  bool fresh = true;  // factorization has no etas and duals were recomputed
  bool bland = false;
  long stall_start = 0;
  double stall_obj = -kInf;
  long bland_until = 0;

  for (;;) {
    if (iterations_ >= tol_.iteration_limit) {
      status_ = Status::kIterationLimit;
      break;
    }
    if ((iterations_ & 63) == 0 && Clock::now() > deadline) {
      status_ = Status::kTimeLimit;
      break;
    }
    if (static_cast<int>(factor_->etas.size()) >= tol_.refactor_interval) {
      if (!refactor()) {
        status_ = Status::kNumericalError;
        diagnostics_ = "basis became singular during refactorization";
        break;
      }
      fresh = true;
    }

    // Stall detection on the dual objective; Bland's rule breaks cycles.
    if ((iterations_ & 127) == 0) {
      double obj = 0.0;
      for (int j = 0; j < N; ++j) obj += cost_[j] * x_[j];
      if (obj > stall_obj + 1e-9 * (1.0 + std::abs(obj))) {
        stall_obj = obj;
        stall_start = iterations_;
      } else if (!bland && iterations_ - stall_start > 2000) {
        bland = true;
        bland_until = iterations_ + 1000;
      }
    }
    if (bland && iterations_ > bland_until) {
      bland = false;
      stall_start = iterations_;
    }

    const int r = choose_leaving(bland);
    if (r < 0) {
      if (!fresh) {
        if (!refactor()) {
          status_ = Status::kNumericalError;
          diagnostics_ = "basis singular at optimality check";
          break;
        }
        fresh = true;
        continue;
      }
      if (fix_dual_infeasibilities() > 0) {
        if (++cleanup_rounds > 50) {
          status_ = Status::kNumericalError;
          diagnostics_ = "dual infeasibilities persist after 50 cleanup rounds";
          break;
        }
        compute_primal();
        continue;
      }
      status_ = Status::kOptimal;
      detect_unbounded();
      break;
    }

    const int leaving = head_[r];
    const double delta = infeasibility(leaving);
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    factor_->btran(rho);
    compute_pivot_row(rho);
    const int q = ratio_test(delta > 0 ? 1.0 : -1.0, bland);
    if (q < 0) {
      if (!fresh) {
        if (!refactor()) {
          status_ = Status::kNumericalError;
          break;
        }
        fresh = true;
        continue;
      }
      status_ = Status::kInfeasible;
      diagnostics_ = fmt::format("row position {} (variable {}) cannot be made feasible", r, leaving);
      break;
    }

    column(q, col);
    factor_->ftran(col);
    const double alpha_q = alpha_row_[q];
    const double pivot = col[r];
    if (std::abs(pivot) <= tol_.pivot ||
        std::abs(pivot - alpha_q) > 1e-7 * (1.0 + std::abs(alpha_q))) {
      if (++failed_pivots > 20) {
        status_ = Status::kNumericalError;
        diagnostics_ = fmt::format("unstable pivot: row {} col {} ({} vs {})", r, q, pivot, alpha_q);
        break;
      }
      if (!refactor()) {
        status_ = Status::kNumericalError;
        break;
      }
      fresh = true;
      continue;
    }
    failed_pivots = 0;

    // Dual step.
    const double theta_d = d_[q] / alpha_q;
    for (int j : touched_) {
      if (status_of_[j] != VarStatus::kBasic) d_[j] -= theta_d * alpha_row_[j];
    }
    d_[q] = 0.0;
    d_[leaving] = -theta_d;

    // Dual steepest-edge weights.
    tau = rho;
    factor_->ftran(tau);
    const double wr = weight_[r];
    for (int i = 0; i < m; ++i) {
      if (i == r || col[i] == 0.0) continue;
      const double ratio = col[i] / pivot;
      const double w = weight_[i] + ratio * (ratio * wr - 2.0 * tau[i]);
      weight_[i] = std::max(w, std::max(ratio * ratio, 1e-8));
    }
    weight_[r] = std::max(wr / (pivot * pivot), 1e-8);

    // Primal step.
    const double target = delta < 0 ? lo_[leaving] : up_[leaving];
    const double step = (x_[leaving] - target) / pivot;
    x_[q] += step;
    for (int i = 0; i < m; ++i) {
      if (col[i] != 0.0) x_[head_[i]] -= step * col[i];
    }
    x_[leaving] = target;

    head_[r] = q;
    status_of_[q] = VarStatus::kBasic;
    status_of_[leaving] = (delta < 0 || lo_[leaving] == up_[leaving]) ? VarStatus::kAtLower
                                                                        : VarStatus::kAtUpper;
    factor_->push(r, col);
    fresh = false;
    ++iterations_;
  }
  total_iterations_ += iterations_;
  return status_;
}

double DualSimplex::objective() const {
  double obj = 0.0;
  for (int j = 0; j < problem_.num_cols; ++j) obj += problem_.cost[j] * x_[j];
  return obj;
}

std::vector<double> DualSimplex::col_values() const {
  return {x_.begin(), x_.begin() + problem_.num_cols};
}

std::vector<double> DualSimplex::row_activities() const {
  std::vector<double> act(problem_.num_rows);
  for (int i = 0; i < problem_.num_rows; ++i) act[i] = -x_[problem_.num_cols + i];
  return act;
}

std::vector<double> DualSimplex::reduced_costs() const {
  return {d_.begin(), d_.begin() + problem_.num_cols};
}

}  // namespace dersizer::lp
