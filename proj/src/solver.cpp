#include "dersizer/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <queue>

#include "dersizer/dual_simplex.hpp"
#include "dersizer/errors.hpp"

namespace dersizer {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapOptimal: return "gap-optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kError: return "error";
  }
  return "?";
}

const char* to_string(Backend b) {
  switch (b) {
    case Backend::kReference: return "reference";
    case Backend::kExternal: return "external";
    case Backend::kOracle: return "oracle";
  }
  return "?";
}

Backend parse_backend(const std::string& label) {
  if (label == "reference") return Backend::kReference;
  if (label == "external") return Backend::kExternal;
  if (label == "oracle") return Backend::kOracle;
  throw ConfigError("unknown backend '" + label + "' (expected reference|external|oracle)");
}

namespace {

using lp::Clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Clock::time_point deadline_after(double seconds) {
  if (!(seconds > 0.0) || seconds > 1e8) return Clock::time_point::max();
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
}

double relative_gap(double incumbent, double bound) {
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

std::vector<int> binary_columns(const MilpInstance& instance) {
  std::vector<int> out;
  for (std::size_t j = 0; j < instance.num_columns(); ++j) {
    if (instance.columns()[j].integer) out.push_back(static_cast<int>(j));
  }
  return out;
}

void require_binary(const MilpInstance& instance) {
  for (const auto& c : instance.columns()) {
    if (c.integer && (c.lower < 0.0 || c.upper > 1.0)) {
      throw SolverError("integer column '" + c.name + "' is not binary");
    }
  }
}

struct Node {
  long id = 0;
  double bound = -kInf;
  int depth = 0;
  std::vector<std::pair<int, double>> fixings;  // (binary column, value)
  std::shared_ptr<const std::vector<lp::VarStatus>> basis;
};

struct NodeOrder {
  // std::priority_queue pops the "largest"; we want the smallest bound,
  // then the deepest node, then the oldest id.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpInstance& instance, const SolveOptions& options)
      : instance_(instance),
        options_(options),
        problem_(lp::Problem::from_instance(instance)),
        lp_(problem_),
        binaries_(binary_columns(instance)) {
    for (int b : binaries_) {
      original_.emplace_back(problem_.col_lower[b], problem_.col_upper[b]);
    }
  }

  SolveResult run() {
    const auto start = Clock::now();
    const auto deadline = deadline_after(options_.time_limit);
    SolveResult result;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{});
    long next_id = 1;
    bool timed_out = false;

    while (!open.empty()) {
      if (has_incumbent() && relative_gap(incumbent_, open.top().bound) <= options_.relative_gap) {
        break;
      }
      if (Clock::now() > deadline) {
        timed_out = true;
        break;
      }
      Node node = open.top();
      open.pop();
      if (has_incumbent() && node.bound >= incumbent_ - prune_tol()) continue;

      apply(node);
      auto st = lp_.solve(node.basis.get(), deadline);
      if (st == lp::Status::kNumericalError) st = lp_.solve(nullptr, deadline);
      ++result.nodes;
      ++lp_solves_;
      lp_iterations_ += lp_.iterations();
      if (st == lp::Status::kTimeLimit) {
        timed_out = true;
        break;
      }
      if (st == lp::Status::kInfeasible) {
        log(node, "infeasible", open);
        continue;
      }
      if (st == lp::Status::kUnbounded) {
        result.status = SolveStatus::kUnbounded;
        result.ray = lp_.ray();
        result.message = "LP relaxation is unbounded";
        return finish(result, start);
      }
      if (st != lp::Status::kOptimal) {
        result.status = SolveStatus::kError;
        result.message = fmt::format("LP at node {} failed: {} {}", node.id, lp::to_string(st),
                                     lp_.diagnostics());
        return finish(result, start);
      }
      const double obj = lp_.objective();
      if (has_incumbent() && obj >= incumbent_ - prune_tol()) {
        log(node, "pruned", open);
        continue;
      }
      auto x = lp_.col_values();
      int branch_col = -1;
      double branch_frac = 0.0;
      for (int b : binaries_) {
        const double frac = std::abs(x[b] - std::round(x[b]));
        if (frac > 1e-6 && frac > branch_frac + 1e-12) {
          branch_frac = frac;
          branch_col = b;
        }
      }
      auto basis = std::make_shared<const std::vector<lp::VarStatus>>(lp_.basis());
      if (branch_col < 0) {
        std::vector<double> rounded(binaries_.size());
        for (std::size_t k = 0; k < binaries_.size(); ++k) rounded[k] = std::round(x[binaries_[k]]);
        try_assignment(rounded, basis.get(), deadline);
        log(node, "integral", open);
        continue;
      }
      if (node.id == 0 || result.nodes % 25 == 0) {
        try_assignment(feasibility_rounding(x), basis.get(), deadline);
      }
      if (has_incumbent() && obj >= incumbent_ - prune_tol()) {
        log(node, "pruned", open);
        continue;
      }
      // Children inherit the parent's LP bound; the side nearer the LP value
      // gets the lower id so it is explored first among equals.
      const double up_first = x[branch_col] >= 0.5 ? 1.0 : 0.0;
      for (double v : {up_first, 1.0 - up_first}) {
        Node child;
        child.id = next_id++;
        child.bound = obj;
        child.depth = node.depth + 1;
        child.fixings = node.fixings;
        child.fixings.emplace_back(branch_col, v);
        child.basis = basis;
        open.push(std::move(child));
      }
      log(node, "branched", open);
    }

    if (timed_out) {
      result.status = SolveStatus::kTimeLimit;
      result.message = "time limit reached";
    } else if (!has_incumbent()) {
      result.status = SolveStatus::kInfeasible;
    } else if (open.empty()) {
      result.status = SolveStatus::kOptimal;
    } else {
      result.status = SolveStatus::kGapOptimal;
    }
    if (has_incumbent()) {
      result.objective = incumbent_;
      result.values = incumbent_values_;
      result.best_bound = open.empty() ? incumbent_ : std::min(open.top().bound, incumbent_);
      result.achieved_gap = relative_gap(incumbent_, result.best_bound);
    }
    return finish(result, start);
  }

 private:
  bool has_incumbent() const { return incumbent_ < kInf; }
  double prune_tol() const {
    return has_incumbent() ? 1e-9 * std::max(1.0, std::abs(incumbent_)) : 0.0;
  }

  void apply(const Node& node) {
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      lp_.set_col_bounds(binaries_[k], original_[k].first, original_[k].second);
    }
    for (const auto& [col, v] : node.fixings) lp_.set_col_bounds(col, v, v);
  }

  // Rounds each binary in the direction that keeps the rows it appears in
  // satisfied at the current LP point; nearest rounding breaks ties.
  std::vector<double> feasibility_rounding(const std::vector<double>& x) const {
    std::vector<double> activity(problem_.num_rows, 0.0);
    for (int j = 0; j < problem_.num_cols; ++j) {
      for (int k = problem_.col_start[j]; k < problem_.col_start[j + 1]; ++k) {
        activity[problem_.row_index[k]] += problem_.value[k] * x[j];
      }
    }
    std::vector<double> out(binaries_.size());
    for (std::size_t idx = 0; idx < binaries_.size(); ++idx) {
      const int b = binaries_[idx];
      auto violation = [&](double v) {
        double total = 0.0;
        for (int k = problem_.col_start[b]; k < problem_.col_start[b + 1]; ++k) {
          const int i = problem_.row_index[k];
          const double act = activity[i] + problem_.value[k] * (v - x[b]);
          total += std::max(0.0, act - problem_.row_upper[i]) +
                   std::max(0.0, problem_.row_lower[i] - act);
        }
        return total;
      };
      const double v0 = violation(0.0);
      const double v1 = violation(1.0);
      const double lo = original_[idx].first;
      const double hi = original_[idx].second;
      double pick = 0.0;
      if (std::abs(v0 - v1) > 1e-9) {
        pick = v0 < v1 ? 0.0 : 1.0;
      } else {
        pick = x[b] >= 0.5 ? 1.0 : 0.0;
      }
      out[idx] = std::clamp(pick, lo, hi);
    }
    return out;
  }

  // Fixes every binary to `assignment`, solves the LP and records an
  // improving incumbent. Bounds are restored by the next apply().
  void try_assignment(const std::vector<double>& assignment,
                      const std::vector<lp::VarStatus>* basis, Clock::time_point deadline) {
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      lp_.set_col_bounds(binaries_[k], assignment[k], assignment[k]);
    }
    auto st = lp_.solve(basis, deadline);
    ++lp_solves_;
    lp_iterations_ += lp_.iterations();
    if (st != lp::Status::kOptimal) return;
    const double obj = lp_.objective();
    if (obj < incumbent_ - prune_tol()) {
      incumbent_ = obj;
      incumbent_values_ = lp_.col_values();
      for (std::size_t k = 0; k < binaries_.size(); ++k) {
        incumbent_values_[binaries_[k]] = assignment[k];
      }
    }
  }

  template <class Queue>
  void log(const Node& node, const char* what, const Queue& open) {
    if (!options_.node_log) return;
    const double bound = open.empty() ? incumbent_ : std::min(open.top().bound, incumbent_);
    *options_.node_log << fmt::format(
        "node {} depth {} {} bound {:.10g} incumbent {:.10g} gap {:.3e}\n", node.id, node.depth,
        what, bound, incumbent_, has_incumbent() ? relative_gap(incumbent_, bound) : kInf);
  }

  SolveResult finish(SolveResult& result, Clock::time_point start) {
    result.lp_iterations = lp_iterations_;
    result.lp_solves = lp_solves_;
    result.wall_seconds = seconds_since(start);
    return result;
  }

  const MilpInstance& instance_;
  SolveOptions options_;
  lp::Problem problem_;
  lp::DualSimplex lp_;
  std::vector<int> binaries_;
  std::vector<std::pair<double, double>> original_;
  double incumbent_ = kInf;
  std::vector<double> incumbent_values_;
  long lp_iterations_ = 0;
  long lp_solves_ = 0;
};

}  // namespace

SolveResult solve_lp(const MilpInstance& instance) {
  const auto start = Clock::now();
  lp::DualSimplex lp(lp::Problem::from_instance(instance));
  const auto st = lp.solve();
  SolveResult result;
  result.lp_iterations = lp.iterations();
  result.lp_solves = 1;
  switch (st) {
    case lp::Status::kOptimal:
      result.status = SolveStatus::kOptimal;
      result.objective = lp.objective();
      result.best_bound = result.objective;
      result.values = lp.col_values();
      break;
    case lp::Status::kInfeasible: result.status = SolveStatus::kInfeasible; break;
    case lp::Status::kUnbounded:
      result.status = SolveStatus::kUnbounded;
      result.ray = lp.ray();
      break;
    case lp::Status::kTimeLimit: result.status = SolveStatus::kTimeLimit; break;
    case lp::Status::kIterationLimit:
    case lp::Status::kNumericalError:
      throw SolverError(fmt::format("LP solve failed ({}): {}", lp::to_string(st), lp.diagnostics()));
  }
  result.message = lp.diagnostics();
  result.wall_seconds = seconds_since(start);
  return result;
}

SolveResult branch_and_bound(const MilpInstance& instance, const SolveOptions& options) {
  require_binary(instance);
  if (options.relative_gap < 0.0) throw SolverError("relative_gap must be >= 0");
  BranchAndBound bnb(instance, options);
  return bnb.run();
}

SolveResult oracle_enumerate(const MilpInstance& instance) {
  require_binary(instance);
  const auto start = Clock::now();
  const auto binaries = binary_columns(instance);
  if (binaries.size() > kOracleMaxBinaries) {
    throw SolverError(fmt::format("oracle_enumerate refuses {} binaries (limit {})",
                                  binaries.size(), kOracleMaxBinaries));
  }
  lp::DualSimplex lp(lp::Problem::from_instance(instance));
  SolveResult result;
  result.status = SolveStatus::kInfeasible;
  double best = kInf;
  const unsigned long combos = 1UL << binaries.size();
  for (unsigned long mask = 0; mask < combos; ++mask) {
    bool allowed = true;
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      const double v = (mask >> k) & 1UL ? 1.0 : 0.0;
      const auto& col = instance.columns()[binaries[k]];
      if (v < col.lower || v > col.upper) allowed = false;
      lp.set_col_bounds(binaries[k], v, v);
    }
    if (!allowed) continue;
    const auto st = lp.solve();
    ++result.lp_solves;
    result.lp_iterations += lp.iterations();
    if (st == lp::Status::kInfeasible) continue;
    if (st == lp::Status::kUnbounded) {
      result.status = SolveStatus::kUnbounded;
      result.ray = lp.ray();
      break;
    }
    if (st != lp::Status::kOptimal) {
      throw SolverError(fmt::format("oracle LP failed on assignment {}: {}", mask, lp::to_string(st)));
    }
    if (lp.objective() < best) {
      best = lp.objective();
      result.values = lp.col_values();
      for (std::size_t k = 0; k < binaries.size(); ++k) {
        result.values[binaries[k]] = (mask >> k) & 1UL ? 1.0 : 0.0;
      }
      result.status = SolveStatus::kOptimal;
    }
  }
  result.nodes = static_cast<long>(result.lp_solves);
  if (result.status == SolveStatus::kOptimal) {
    result.objective = best;
    result.best_bound = best;
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

SolveResult solve_milp(const MilpInstance& instance, const SolveOptions& options) {
  switch (options.backend) {
    case Backend::kReference: return branch_and_bound(instance, options);
    case Backend::kOracle: return oracle_enumerate(instance);
    case Backend::kExternal: return solve_external(instance, options);
  }
  throw SolverError("unknown backend");
}

}  // namespace dersizer
