// External MILP backend: LP file out, solution file back.
//
// The command is invoked as
//   <command> --gap <g> --time-limit <s> <model.lp> <solution.txt>
// and must write a solution file of whitespace-separated lines:
//   status <optimal|gap-optimal|infeasible|time-limit|unbounded|error>
//   objective <value>
//   bound <value>
//   <column name> <value>      (one per column)

#include <fmt/format.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "dersizer/errors.hpp"
#include "dersizer/solver.hpp"

#ifndef DERSIZER_HIGHS_WRAPPER
#define DERSIZER_HIGHS_WRAPPER ""
#endif

namespace dersizer {
namespace {

std::string default_command() {
  if (const char* env = std::getenv("DERSIZER_EXTERNAL_SOLVER"); env && *env) return env;
  const std::filesystem::path wrapper = DERSIZER_HIGHS_WRAPPER;
  if (!wrapper.empty() && std::filesystem::exists(wrapper)) {
    return "python3 '" + wrapper.string() + "'";
  }
  return {};
}

SolveStatus parse_status(const std::string& s) {
  if (s == "optimal") return SolveStatus::kOptimal;
  if (s == "gap-optimal") return SolveStatus::kGapOptimal;
  if (s == "infeasible") return SolveStatus::kInfeasible;
  if (s == "time-limit") return SolveStatus::kTimeLimit;
  if (s == "unbounded") return SolveStatus::kUnbounded;
  return SolveStatus::kError;
}

std::filesystem::path scratch_dir() {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             fmt::format("dersizer-{}-{}", ::getpid(), counter.fetch_add(1));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

SolveResult solve_external(const MilpInstance& instance, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  const std::string command =
      options.external_command.empty() ? default_command() : options.external_command;
  if (command.empty()) {
    result.status = SolveStatus::kError;
    result.message = "no external solver configured (set DERSIZER_EXTERNAL_SOLVER)";
    return result;
  }
  const auto dir = scratch_dir();
  const auto lp_path = dir / "model.lp";
  const auto sol_path = dir / "solution.txt";
  {
    std::ofstream out(lp_path);
    if (!out) throw ConfigError("cannot write " + lp_path.string());
    write_lp(out, instance);
  }
  const std::string cmd =
      fmt::format("{} --gap {:.17g} --time-limit {:.17g} '{}' '{}' > '{}' 2>&1", command,
                  options.relative_gap, options.time_limit, lp_path.string(), sol_path.string(),
                  (dir / "solver.log").string());
  const int rc = std::system(cmd.c_str());

  std::ifstream in(sol_path);
  if (rc != 0 || !in) {
    result.status = SolveStatus::kError;
    result.message = fmt::format("external solver failed (exit {}); see {}", rc,
                                 (dir / "solver.log").string());
    return result;
  }
  std::unordered_map<std::string, int> by_name;
  for (std::size_t j = 0; j < instance.num_columns(); ++j) {
    by_name.emplace(instance.columns()[j].name, static_cast<int>(j));
  }
  result.values.assign(instance.num_columns(), 0.0);
  std::string line;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    std::string value;
    if (!(ss >> key >> value)) continue;
    if (key == "status") {
      result.status = parse_status(value);
    } else if (key == "objective") {
      result.objective = std::stod(value);
    } else if (key == "bound") {
      result.best_bound = std::stod(value);
    } else if (auto it = by_name.find(key); it != by_name.end()) {
      result.values[it->second] = std::stod(value);
      ++seen;
    }
  }
  if (result.has_solution()) {
    if (seen != instance.num_columns()) {
      result.status = SolveStatus::kError;
      result.message = fmt::format("external solution lists {} of {} columns", seen,
                                   instance.num_columns());
      return result;
    }
    // Snap binaries; the solver's integrality tolerance is not ours.
    for (std::size_t j = 0; j < instance.num_columns(); ++j) {
      if (instance.columns()[j].integer) result.values[j] = std::round(result.values[j]);
    }
    result.objective = instance.objective_value(result.values);
    result.achieved_gap = std::max(0.0, result.objective - result.best_bound) /
                          std::max(1.0, std::abs(result.objective));
  } else {
    result.values.clear();
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  return result;
}

}  // namespace dersizer
