// dersizer: run sizing studies, reduce annual profiles, validate configs.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "dersizer/errors.hpp"
#include "dersizer/study.hpp"

using namespace dersizer;

namespace {

struct RunArgs {
  std::string config;
  std::vector<int> cases;
  double gap = -1;
  double time_limit = -1;
  std::string backend;
  std::string out;
  bool audit = false;
  bool write_lp = false;
};

int cmd_run(const RunArgs& a) {
  auto cfg = load_study_config(a.config);
  if (!a.cases.empty()) cfg.cases = a.cases;
  if (a.gap >= 0) cfg.solve.relative_gap = a.gap;
  if (a.time_limit > 0) cfg.solve.time_limit = a.time_limit;
  if (!a.backend.empty()) cfg.solve.backend = parse_backend(a.backend);
  if (!a.out.empty()) cfg.output_dir = a.out;
  cfg.write_lp = cfg.write_lp || a.write_lp;

  const auto report = validate_study_config(cfg);
  if (!report.ok()) {
    std::cerr << "invalid config:\n" << report.to_string();
    return kExitConfigError;
  }
  const auto outcome = run_study(cfg, &std::cout);
  if (a.audit) {
    for (const auto& c : outcome.cases) {
      std::cout << fmt::format("--- audit case {} ---\n", c.case_index);
      std::cout << (c.audit ? c.audit->to_string() : std::string("not audited\n"));
    }
  }
  std::cout << fmt::format("outputs in {}\n", cfg.output_dir.string());
  return outcome.exit_code;
}

int cmd_reduce(const std::string& profile, std::size_t k, bool include_pv, const std::string& out) {
  ReductionConfig rc;
  rc.k = k;
  rc.include_pv = include_pv;
  const auto annual = parse_profile_csv(profile);
  const auto set = reduce_scenarios(annual, rc, LoadSplitSpec{});
  if (out.empty()) {
    write_reduction_csv(std::cout, set);
  } else {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write " + out);
    write_reduction_csv(f, set);
  }
  std::cerr << fmt::format("reconstruction error {:.3f} kW over {} days\n",
                           reconstruction_error(annual, set), annual.whole_days());
  return kExitOk;
}

int cmd_validate(const std::string& config) {
  const auto cfg = load_study_config(config);
  const auto report = validate_study_config(cfg);
  if (report.ok()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  std::cout << report.to_string();
  return kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DER sizing for hybrid AC/DC microgrids"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "solve the configured cases and write reports");
  run_cmd->add_option("--config", run.config, "study JSON file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--cases", run.cases, "comma-separated case list")->delimiter(',');
  run_cmd->add_option("--gap", run.gap, "relative MIP gap");
  run_cmd->add_option("--time-limit", run.time_limit, "per-case time limit in seconds");
  run_cmd->add_option("--backend", run.backend, "reference, external or oracle")
      ->check(CLI::IsMember({"reference", "external", "oracle"}));
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_flag("--audit", run.audit, "print the audit report of every case");
  run_cmd->add_flag("--write-lp", run.write_lp, "also write model_<case>.lp");

  std::string profile, reduce_out;
  std::size_t k = 6;
  bool include_pv = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "pick representative days from an annual profile");
  reduce_cmd->add_option("--profile", profile, "hourly CSV")->required()->check(CLI::ExistingFile);
  reduce_cmd->add_option("--k", k, "number of representative days");
  reduce_cmd->add_flag("--include-pv", include_pv, "use PV availability in the day distance");
  reduce_cmd->add_option("--out", reduce_out, "output CSV (default stdout)");

  std::string validate_config;
  auto* validate_cmd = app.add_subcommand("validate", "check a study config and its inputs");
  validate_cmd->add_option("--config", validate_config, "study JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*reduce_cmd) return cmd_reduce(profile, k, include_pv, reduce_out);
    if (*validate_cmd) return cmd_validate(validate_config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolveFailure;
  }
  return kExitOk;
}
