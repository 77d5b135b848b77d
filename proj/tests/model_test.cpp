#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dersizer/audit.hpp"
#include "dersizer/errors.hpp"
#include "dersizer/model.hpp"
#include "dersizer/solver.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace dersizer;
using dersizer::testkit::random_tiny;
using dersizer::testkit::zero_load;

long meta(const MilpInstance& m, const std::string& key) {
  for (const auto& [k, v] : m.metadata) {
    if (k == key) return v;
  }
  return -1;
}

TEST(BigM, StorageBoundIsTheCap) {
  const auto in = zero_load();
  EXPECT_EQ(compute_big_m(in.set, in.catalog).m_es, 350.0);
}

TEST(BigM, DegeneratesToZeroWithoutLoadOrResources) {
  auto in = zero_load();
  in.catalog.pv_max = 0;
  in.catalog.es_max = 0;
  EXPECT_EQ(compute_big_m(in.set, in.catalog).m_flow, 0.0);
  // the builder still produces well-posed switch rows
  const auto m = build_model(in.set, in.catalog, in.tariff, CaseSpec::from_index(3));
  for (const auto& r : m.rows()) {
    if (r.family == static_cast<int>(RowFamily::kIcOutSwitch)) EXPECT_EQ(r.rhs, 1.0);
  }
}

TEST(BigM, PeakLoadPlusResources) {
  auto in = zero_load(1, 24);
  in.set.days[0].nl_ac[13] = 846.0;
  EXPECT_NEAR(compute_big_m(in.set, in.catalog).m_flow, 846 + 400 * 0.98 + 350 * 0.93, 1e-9);
}

TEST(Dimensions, MatchCountsForEveryCase) {
  std::mt19937_64 rng(1);
  for (int S : {1, 2}) {
    for (int T : {1, 3, 24}) {
      const auto in = random_tiny(rng, S, T);
      for (int k = 0; k < 4; ++k) {
        const auto cs = CaseSpec::from_index(k);
        const auto m = build_model(in.set, in.catalog, in.tariff, cs);
        const auto d = model_dimensions(S, T, cs);
        EXPECT_EQ(static_cast<long>(m.num_columns()), d.columns) << S << "x" << T << " case " << k;
        EXPECT_EQ(static_cast<long>(m.num_rows()), d.rows) << S << "x" << T << " case " << k;
        EXPECT_EQ(static_cast<long>(m.num_integer()), d.binaries);
        EXPECT_EQ(meta(m, "columns"), d.columns);
        EXPECT_EQ(meta(m, "rows"), d.rows);
      }
    }
  }
}

TEST(Dimensions, FullDayWithStorage) {
  const auto d = model_dimensions(1, 24, CaseSpec::from_index(3));
  EXPECT_EQ(d.columns, 5 + 2 + 25 * 24);
  EXPECT_EQ(d.rows, 1 + 31 * 24);
  EXPECT_EQ(d.binaries, 72);
}

TEST(BuildModel, DisabledResourcesAreFixedAtZero) {
  std::mt19937_64 rng(2);
  const auto in = random_tiny(rng);
  const auto m0 = build_model(in.set, in.catalog, in.tariff, CaseSpec::from_index(0));
  EXPECT_EQ(m0.columns()[m0.at({Symbol::kXPv})].upper, 0.0);
  EXPECT_EQ(m0.columns()[m0.at({Symbol::kXEs})].upper, 0.0);
  EXPECT_EQ(m0.columns()[m0.at({Symbol::kXInv})].upper, 0.0);
  EXPECT_FALSE(m0.find({Symbol::kSoc, 0, 0}).has_value());
  EXPECT_FALSE(m0.find({Symbol::kDchState, 0, 0}).has_value());
  const auto m3 = build_model(in.set, in.catalog, in.tariff, CaseSpec::from_index(3));
  EXPECT_EQ(m3.columns()[m3.at({Symbol::kXPv})].upper, 400.0);
  EXPECT_EQ(m3.columns()[m3.at({Symbol::kXEs})].upper, 350.0);
  EXPECT_EQ(m3.columns()[m3.at({Symbol::kGrid, 0, 1})].lower, 0.0);
}

TEST(BuildModel, BinariesAreBoxedAndNamesAreUnique) {
  std::mt19937_64 rng(4);
  const auto in = random_tiny(rng, 2, 4);
  const auto m = build_model(in.set, in.catalog, in.tariff, CaseSpec::from_index(3));
  std::vector<std::string> names;
  for (const auto& c : m.columns()) {
    if (c.integer) {
      EXPECT_EQ(c.lower, 0.0);
      EXPECT_EQ(c.upper, 1.0);
    }
    names.push_back(c.name);
  }
  std::sort(names.begin(), names.end());
  EXPECT_EQ(std::adjacent_find(names.begin(), names.end()), names.end());
  // every indexed symbol appears once per (s, t)
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 4; ++t) {
      for (int k = static_cast<int>(Symbol::kGrid); k < kSymbolCount; ++k) {
        EXPECT_TRUE(m.find({static_cast<Symbol>(k), s, t}).has_value())
            << symbol_name(static_cast<Symbol>(k));
      }
    }
  }
}

TEST(BuildModel, RejectsInconsistentInputs) {
  std::mt19937_64 rng(5);
  auto in = random_tiny(rng, 2, 3);
  in.set.days[1].cl_dc.push_back(1.0);
  try {
    build_model(in.set, in.catalog, in.tariff, {});
    FAIL();
  } catch (const BuildError& e) {
    EXPECT_NE(std::string(e.what()).find("day1"), std::string::npos) << e.what();
  }
  in = random_tiny(rng);
  in.catalog.eta_con = 0.0;
  EXPECT_THROW(build_model(in.set, in.catalog, in.tariff, {}), BuildError);
  in = random_tiny(rng);
  in.tariff.energy_price.pop_back();
  EXPECT_THROW(build_model(in.set, in.catalog, in.tariff, {}), BuildError);
}

// x in [lo, up] fixed by bounds, y fixed by bounds; returns [min u, max u].
std::pair<double, double> product_range(double x, double y, double m) {
  MilpInstance inst;
  Column cx;
  cx.name = "x";
  cx.lower = cx.upper = x;
  const int jx = inst.add_column(cx);
  Column cy;
  cy.name = "y";
  cy.lower = cy.upper = y;
  cy.integer = true;
  const int jy = inst.add_column(cy);
  const auto p = linearize_product(inst, jx, jy, m, {Symbol::kDchAux, 0, 0},
                                   {Symbol::kDchAuxSlack, 0, 0}, "_t");
  EXPECT_EQ(p.rows.size(), 3u);
  inst.mutable_columns()[p.u].cost = 1.0;
  const double lo = solve_lp(inst).objective;
  inst.mutable_columns()[p.u].cost = -1.0;
  const double hi = -solve_lp(inst).objective;
  return {lo, hi};
}

TEST(LinearizeProduct, OnBranchForcesFullValue) {
  const auto [lo, hi] = product_range(350, 1, 350);
  EXPECT_NEAR(lo, 350, 1e-9);
  EXPECT_NEAR(hi, 350, 1e-9);
}

TEST(LinearizeProduct, OffBranchForcesZero) {
  const auto [lo, hi] = product_range(350, 0, 350);
  EXPECT_NEAR(lo, 0, 1e-9);
  EXPECT_NEAR(hi, 0, 1e-9);
}

TEST(LinearizeProduct, InteriorValue) {
  const auto [lo, hi] = product_range(123.4, 1, 350);
  EXPECT_NEAR(lo, 123.4, 1e-9);
  EXPECT_NEAR(hi, 123.4, 1e-9);
}

TEST(LinearizeProduct, RandomPointsAreExact) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 350.0);
  for (int i = 0; i < 40; ++i) {
    const double x = u(rng);
    const double y = i % 2;
    const auto [lo, hi] = product_range(x, y, 350.0 + u(rng));
    EXPECT_NEAR(lo, x * y, 1e-7);
    EXPECT_NEAR(hi, x * y, 1e-7);
  }
}

TEST(LinearizeProduct, RejectsSmallBigM) {
  MilpInstance inst;
  Column cx;
  cx.name = "x";
  cx.upper = 350;
  const int jx = inst.add_column(cx);
  Column cy;
  cy.name = "y";
  cy.upper = 1;
  cy.integer = true;
  const int jy = inst.add_column(cy);
  EXPECT_THROW(linearize_product(inst, jx, jy, 300, {Symbol::kDchAux, 0, 0},
                                 {Symbol::kDchAuxSlack, 0, 0}, "_t"),
               BuildError);
}

struct Solved {
  MilpInstance instance;
  SolveResult result;
  SizingSolution solution;
};

Solved solve_case(const testkit::TinyInputs& in, int k, SolveOptions opt = {}) {
  Solved out;
  const auto cs = CaseSpec::from_index(k);
  out.instance = build_model(in.set, in.catalog, in.tariff, cs);
  out.result = solve_milp(out.instance, opt);
  out.solution = extract_solution(out.instance, out.result, in.set, in.catalog, in.tariff, cs);
  return out;
}

TEST(SizingModel, GridOnlyTwoIntervalsMatchesHandBill) {
  testkit::TinyInputs in;
  in.tariff.energy_price = {0.1, 0.2};
  DayScenario d;
  d.id = "hand";
  d.cl_ac = {30, 60};
  d.cl_dc = {30, 45};
  d.nl_ac = {70, 140};
  d.nl_dc = {70, 105};
  d.pv_availability = {0.2, 0.8};
  in.set.days = {d};
  const auto r = solve_case(in, 0);
  ASSERT_EQ(r.result.status, SolveStatus::kOptimal) << r.result.message;

  // AC load straight from the grid, DC load through the interfacing converter.
  const double eta = 0.96;
  const double g0 = 100 + 100 / eta;
  const double g1 = 200 + 150 / eta;
  const double bill = 365 * (0.1 * g0 + 0.2 * g1) + 12 * 18 * std::max(g0, g1);
  const double ic = 8.1 * (150 / eta);
  const double shed = 365 * (3000.0 * (30 + 60 + 30 + 45) + 500.0 * (70 + 140 + 70 + 105));
  EXPECT_NEAR(r.result.objective, bill + ic + shed, 1e-6 * (bill + ic + shed));
  EXPECT_NEAR(r.solution.capacities.ic, 150 / eta, 1e-6);
  EXPECT_EQ(r.solution.capacities.pv, 0.0);
  EXPECT_EQ(r.solution.capacities.es, 0.0);
  EXPECT_NEAR(r.solution.scenarios[0].grid.peak, g1, 1e-6);
  EXPECT_NEAR(r.solution.costs.total, r.result.objective, 1e-6 * r.result.objective);
}

TEST(SizingModel, ZeroLoadCostsNothing) {
  const auto in = zero_load(2, 3);
  for (int k = 0; k < 4; ++k) {
    const auto r = solve_case(in, k);
    ASSERT_TRUE(r.result.has_solution());
    EXPECT_NEAR(r.result.objective, 0.0, 1e-9);
    const auto& x = r.solution.capacities;
    for (double v : {x.pv, x.es, x.ic, x.inv, x.con}) EXPECT_NEAR(v, 0.0, 1e-9);
    EXPECT_EQ(r.solution.costs.total, 0.0);
    const auto audit = check_solution(r.solution, in.set, in.catalog, in.tariff);
    EXPECT_TRUE(audit.ok()) << audit.to_string();
  }
}

TEST(SizingModel, ReferenceMatchesOracleOnTinyInstances) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const auto in = random_tiny(rng);
    const int k = trial % 4;
    const auto cs = CaseSpec::from_index(k);
    const auto m = build_model(in.set, in.catalog, in.tariff, cs);
    SolveOptions opt;
    opt.relative_gap = 1e-6;
    const auto bb = solve_milp(m, opt);
    const auto oracle = oracle_enumerate(m);
    ASSERT_TRUE(bb.has_solution()) << bb.message;
    ASSERT_TRUE(oracle.has_solution());
    EXPECT_NEAR(bb.objective, oracle.objective, 1e-6 * std::max(1.0, std::abs(oracle.objective)))
        << "trial " << trial;
    const auto sol = extract_solution(m, bb, in.set, in.catalog, in.tariff, cs);
    const auto audit = check_solution(sol, in.set, in.catalog, in.tariff);
    EXPECT_TRUE(audit.ok()) << audit.to_string();
  }
}

TEST(SizingModel, CostBreakdownMatchesObjective) {
  std::mt19937_64 rng(99);
  const auto in = random_tiny(rng, 2, 4);
  const auto r = solve_case(in, 3);
  ASSERT_TRUE(r.result.has_solution());
  EXPECT_NEAR(r.solution.costs.total, r.result.objective, 1e-6 * std::max(1.0, r.result.objective));
  EXPECT_NEAR(r.solution.costs.sum_of_components(), r.solution.costs.total, 1e-9);
  const auto audit_costs = recompute_cost_breakdown(r.solution, in.set, in.catalog, in.tariff);
  EXPECT_NEAR(audit_costs.total, r.solution.costs.total, 1e-6 * r.solution.costs.total);
}

TEST(SizingModel, ExtractRejectsUnboundedAndKeepsInfeasibleEmpty) {
  std::mt19937_64 rng(3);
  const auto in = random_tiny(rng);
  const auto m = build_model(in.set, in.catalog, in.tariff, {});
  SolveResult r;
  r.status = SolveStatus::kUnbounded;
  EXPECT_THROW(extract_solution(m, r, in.set, in.catalog, in.tariff, {}), SolverError);
  r.status = SolveStatus::kInfeasible;
  const auto sol = extract_solution(m, r, in.set, in.catalog, in.tariff, {});
  EXPECT_FALSE(sol.feasible());
  EXPECT_EQ(sol.status, SolveStatus::kInfeasible);
}

TEST(SizingModel, FixedInitialSocOption) {
  std::mt19937_64 rng(12);
  const auto in = random_tiny(rng, 1, 4);
  ModelOptions opt;
  opt.soc_boundary = SocBoundary::kFixedFraction;
  opt.initial_soc_fraction = 0.5;
  const auto cs = CaseSpec::from_index(3);
  const auto m = build_model(in.set, in.catalog, in.tariff, cs, opt);
  const auto r = solve_milp(m);
  ASSERT_TRUE(r.has_solution());
  const auto sol = extract_solution(m, r, in.set, in.catalog, in.tariff, cs, opt);
  EXPECT_NEAR(sol.scenarios[0].grid.soc_init, 0.5 * 2 * sol.capacities.es, 1e-6);
  EXPECT_TRUE(check_solution(sol, in.set, in.catalog, in.tariff).ok());
  opt.initial_soc_fraction = 0.95;
  EXPECT_THROW(build_model(in.set, in.catalog, in.tariff, cs, opt), BuildError);
}

TEST(Audit, DetectsBumpedSoc) {
  std::mt19937_64 rng(21);
  auto in = random_tiny(rng, 1, 4);
  auto r = solve_case(in, 3);
  ASSERT_TRUE(r.result.has_solution());
  ASSERT_TRUE(check_solution(r.solution, in.set, in.catalog, in.tariff).ok());
  auto bad = r.solution;
  auto& soc = bad.scenarios[0].grid.soc;
  // pick an interior interval with headroom below the band's top
  const double top = in.catalog.alpha_max * in.catalog.rho_ep * bad.capacities.es;
  int t = 1;
  while (t < 3 && soc[t] + 1.0 > top) ++t;
  ASSERT_LT(t, 3);
  soc[t] += 1.0;
  const auto report = check_solution(bad, in.set, in.catalog, in.tariff);
  ASSERT_FALSE(report.ok());
  for (const auto& v : report.violations) {
    EXPECT_EQ(v.family, "soc-transition");
    EXPECT_EQ(v.scenario, 0);
    EXPECT_TRUE(v.interval == t || v.interval == t + 1) << v.interval;
  }
  EXPECT_EQ(report.violations.size(), 2u);
}

TEST(Audit, CatchesCorruptedBuilderRow) {
  std::mt19937_64 rng(22);
  const auto in = random_tiny(rng, 1, 3);
  const auto cs = CaseSpec::from_index(3);
  auto m = build_model(in.set, in.catalog, in.tariff, cs);
  // serve only part of the AC load in one interval
  for (auto& row : m.mutable_rows()) {
    if (row.name == "bal_ac_s0_t1") row.rhs -= 25.0;
  }
  const auto r = solve_milp(m);
  ASSERT_TRUE(r.has_solution());
  const auto sol = extract_solution(m, r, in.set, in.catalog, in.tariff, cs);
  const auto report = check_solution(sol, in.set, in.catalog, in.tariff);
  ASSERT_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) found |= v.family == "ac-balance" && v.interval == 1;
  EXPECT_TRUE(found) << report.to_string();
}

TEST(Audit, MissingDispatchThrows) {
  std::mt19937_64 rng(23);
  const auto in = random_tiny(rng, 2, 3);
  SizingSolution sol;
  EXPECT_THROW(check_solution(sol, in.set, in.catalog, in.tariff), AuditError);
  auto r = solve_case(in, 3);
  r.solution.scenarios[1].island.lcl_ac.pop_back();
  EXPECT_THROW(check_solution(r.solution, in.set, in.catalog, in.tariff), AuditError);
}

TEST(Invariants, SocTelescopesAndFlowsAreExclusive) {
  std::mt19937_64 rng(31);
  const auto in = random_tiny(rng, 2, 5);
  const auto r = solve_case(in, 3);
  ASSERT_TRUE(r.result.has_solution());
  const auto& c = in.catalog;
  for (const auto& d : r.solution.scenarios) {
    const auto& g = d.grid;
    double net = 0.0;
    for (std::size_t t = 0; t < g.soc.size(); ++t) {
      net += (g.ch_ac[t] + g.ch_dc[t]) * c.eta_ch - (g.dch_ac[t] + g.dch_dc[t]) / c.eta_dch;
      EXPECT_LE(std::min(g.f_dcin[t], g.f_dcout[t]), 1e-6);
      EXPECT_LE(std::min(g.ch_ac[t] + g.ch_dc[t], g.dch_ac[t] + g.dch_dc[t]), 1e-6);
      EXPECT_NEAR(g.u_es[t], r.solution.capacities.es * g.y_es[t], 1e-6 * c.es_max);
      EXPECT_LE(g.p_grid[t], g.peak + 1e-6);
      EXPECT_LE(g.peak, in.tariff.peak_cap + 1e-6);
    }
    EXPECT_NEAR(g.soc.back() - g.soc_init, net, 1e-6);
  }
}

}  // namespace
