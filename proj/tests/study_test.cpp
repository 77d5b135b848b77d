#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dersizer/errors.hpp"
#include "dersizer/study.hpp"
#include "dersizer/synthetic.hpp"

namespace fs = std::filesystem;
using namespace dersizer;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dersizer_study_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Two weeks of the synthetic year, small enough for every case to solve quickly.
fs::path two_week_profile(const fs::path& dir) {
  auto year = synthetic_building_year();
  const std::size_t n = 14 * kHoursPerDay;
  year.timestamps.resize(n);
  year.epoch_hours.resize(n);
  year.load_kw.resize(n);
  year.pv_pu.resize(n);
  const auto path = dir / "profile.csv";
  write_profile_csv(path, year);
  return path;
}

StudyConfig small_config(const fs::path& dir) {
  StudyConfig cfg;
  cfg.profile = two_week_profile(dir);
  cfg.reduction.k = 2;
  cfg.solve.relative_gap = 1e-4;
  return cfg;
}

}  // namespace

TEST(Savings, FractionsMatchHandComputedExamples) {
  EXPECT_NEAR(savings_fraction(87.29, 61.56), 0.295, 5e-4);
  EXPECT_NEAR(savings_fraction(74.59, 54.34), 0.271, 5e-4);
  EXPECT_EQ(savings_fraction(50.0, 50.0), 0.0);
}

TEST(Savings, ZeroBaseComponentIsNotApplicable) {
  CostBreakdown base;
  base.energy_charges = 87.29;
  base.total = 87.29;
  CostBreakdown other = base;
  other.energy_charges = 61.56;
  other.total = 61.56;
  const auto t = compare_cases({{0, base}, {3, other}});
  ASSERT_EQ(t.by_case.count(3), 1u);
  const auto& row = t.by_case.at(3);
  ASSERT_EQ(row.size(), t.components.size());
  for (std::size_t i = 0; i < t.components.size(); ++i) {
    if (t.components[i] == "energy_charges" || t.components[i] == "total" ||
        t.components[i] == "total_payment") {
      ASSERT_TRUE(row[i].has_value()) << t.components[i];
      EXPECT_NEAR(*row[i], 0.29476, 1e-4);
    } else {
      EXPECT_FALSE(row[i].has_value()) << t.components[i];
    }
  }
  std::ostringstream os;
  write_savings_csv(os, t);
  EXPECT_NE(os.str().find("demand_charges,n/a"), std::string::npos);
}

TEST(Savings, IdenticalResultsSaveNothing) {
  CostBreakdown b{100.0, 40.0, 30.0, 2.0, 0.0, 1.0, 173.0};
  const auto t = compare_cases({{0, b}, {1, b}});
  for (const auto& v : t.by_case.at(1)) {
    if (v) EXPECT_EQ(*v, 0.0);
  }
}

TEST(StudyConfigParse, ReadsNestedSectionsAndResolvesPaths) {
  const auto cfg = parse_study_config(R"({
    "profile": "data/p.csv", "output_dir": "/tmp/x", "cases": [3, 0],
    "reduction": {"k": 4, "include_pv": true},
    "catalog": {"voll_cl": 6000, "capital": {"rate": 0.0, "years": 10, "pv": 1000}},
    "tariff": {"demand_price": 20, "peak_cap": 900},
    "model": {"soc_boundary": "fixed", "initial_soc_fraction": 0.4},
    "solver": {"gap": 0.001, "backend": "reference"}
  })",
                                      "/base");
  EXPECT_EQ(cfg.profile, fs::path("/base/data/p.csv"));
  EXPECT_EQ(cfg.output_dir, fs::path("/tmp/x"));
  EXPECT_EQ(cfg.cases, (std::vector<int>{3, 0}));
  EXPECT_EQ(cfg.reduction.k, 4u);
  EXPECT_TRUE(cfg.reduction.include_pv);
  EXPECT_EQ(cfg.catalog.voll_cl, 6000.0);
  EXPECT_DOUBLE_EQ(cfg.catalog.c_pv, 100.0);  // 1000 $/kW over 10 years at 0%
  EXPECT_EQ(cfg.catalog.c_es, DeviceCatalog{}.c_es);
  EXPECT_EQ(cfg.tariff.demand_price, 20.0);
  EXPECT_EQ(cfg.tariff.energy_price.size(), kHoursPerDay);
  EXPECT_EQ(cfg.model.soc_boundary, SocBoundary::kFixedFraction);
  EXPECT_EQ(cfg.solve.relative_gap, 1e-3);
}

TEST(StudyConfigParse, RejectsUnknownKeysAndBadJson) {
  EXPECT_THROW(parse_study_config(R"({"profile": "p.csv", "gap": 1})", "."), ConfigError);
  EXPECT_THROW(parse_study_config(R"({"profile": "p.csv", "catalog": {"c_xx": 1}})", "."),
               ConfigError);
  EXPECT_THROW(parse_study_config("{not json", "."), ConfigError);
  EXPECT_THROW(parse_study_config(R"({"cases": [0]})", "."), ConfigError);
}

TEST(StudyConfigValidate, FlagsBadCasesAndOversizedK) {
  const auto dir = scratch("validate");
  auto cfg = small_config(dir);
  EXPECT_TRUE(validate_study_config(cfg).ok()) << validate_study_config(cfg).to_string();
  cfg.cases = {0, 5};
  cfg.reduction.k = 15;
  const auto r = validate_study_config(cfg);
  EXPECT_EQ(r.violations.size(), 2u) << r.to_string();
  cfg.cases = {0};
  cfg.reduction.k = 2;
  cfg.profile = dir / "missing.csv";
  EXPECT_FALSE(validate_study_config(cfg).ok());
}

TEST(Study, CaseOrderDoesNotChangeAnyOutputByte) {
  const auto dir = scratch("order");
  auto a = small_config(dir);
  a.cases = {0, 3};
  a.output_dir = dir / "a";
  auto b = a;
  b.cases = {3, 0};
  b.output_dir = dir / "b";
  const auto ra = run_study(a);
  const auto rb = run_study(b);
  EXPECT_EQ(ra.exit_code, kExitOk);
  EXPECT_EQ(rb.exit_code, kExitOk);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a.output_dir)) {
    const auto name = entry.path().filename();
    ASSERT_TRUE(fs::exists(b.output_dir / name)) << name;
    EXPECT_EQ(slurp(entry.path()), slurp(b.output_dir / name)) << name;
    ++files;
  }
  // results, savings, scenarios, report + per case: 2 dispatch, curtailment, audit
  EXPECT_EQ(files, 4u + 2u * 4u);
  EXPECT_EQ(files, static_cast<std::size_t>(std::distance(fs::directory_iterator(b.output_dir),
                                                          fs::directory_iterator())));
}

TEST(Study, AllCasesSolveCleanAndNest) {
  const auto dir = scratch("nest");
  auto cfg = small_config(dir);
  cfg.output_dir = dir / "out";
  const auto r = run_study(cfg);
  ASSERT_EQ(r.exit_code, kExitOk);
  ASSERT_EQ(r.cases.size(), 4u);
  for (const auto& c : r.cases) {
    ASSERT_TRUE(c.solved()) << c.case_index << " " << c.error;
    ASSERT_TRUE(c.audit.has_value());
    EXPECT_TRUE(c.audit->ok()) << c.audit->to_string();
  }
  const double tol = 2 * cfg.solve.relative_gap;
  auto total = [&](int k) { return r.cases[static_cast<std::size_t>(k)].solution.costs.total; };
  EXPECT_LE(total(3), total(1) * (1 + tol));
  EXPECT_LE(total(3), total(2) * (1 + tol));
  EXPECT_LE(total(1), total(0) * (1 + tol));
  EXPECT_LE(total(2), total(0) * (1 + tol));
  const auto report = slurp(cfg.output_dir / "report.txt");
  EXPECT_NE(report.find("monthly"), std::string::npos);
  const auto results = slurp(cfg.output_dir / "results.csv");
  EXPECT_EQ(results.rfind("metric,case_0,case_1,case_2,case_3\n", 0), 0u);
}

TEST(Study, ZeroLoadGivesAllZeroRows) {
  const auto dir = scratch("zero");
  auto year = synthetic_building_year();
  const std::size_t n = 3 * kHoursPerDay;
  year.timestamps.resize(n);
  year.epoch_hours.resize(n);
  year.load_kw.assign(n, 0.0);
  year.pv_pu.resize(n);
  StudyConfig cfg;
  cfg.profile = dir / "zero.csv";
  write_profile_csv(cfg.profile, year);
  cfg.reduction.k = 1;
  cfg.output_dir = dir / "out";
  const auto r = run_study(cfg);
  ASSERT_EQ(r.exit_code, kExitOk);
  std::istringstream results(slurp(cfg.output_dir / "results.csv"));
  std::string line;
  std::getline(results, line);  // header
  std::getline(results, line);  // status
  while (std::getline(results, line)) {
    if (line.rfind("gap,", 0) == 0) continue;
    const auto metric = line.substr(0, line.find(','));
    std::istringstream cells(line.substr(line.find(',') + 1));
    std::string cell;
    while (std::getline(cells, cell, ',')) EXPECT_EQ(cell, "0.000000") << metric;
  }
}

TEST(Study, ResultsSchemaIsStable) {
  std::vector<CaseOutcome> cases(2);
  cases[0].case_index = 0;
  cases[1].case_index = 3;
  std::ostringstream os;
  write_results_csv(os, cases, ScenarioSet{});
  std::istringstream in(os.str());
  std::string line, metrics;
  while (std::getline(in, line)) metrics += line.substr(0, line.find(',')) + ";";
  EXPECT_EQ(metrics,
            "metric;status;pv_kw;es_kw;inverter_kw;converter_kw;ic_kw;energy_charges;demand_charges;"
            "total_payment;shed_energy_kwh;shed_critical_kwh;investment;degradation;shedding_cost;"
            "total_cost;max_grid_kw;gap;");
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "metric,case_0,case_3");
}
