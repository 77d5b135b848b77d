#include "dersizer/study.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "dersizer/errors.hpp"
#include "dersizer/finance.hpp"

namespace dersizer {

using nlohmann::json;

namespace {

// Reads the keys of `obj` into `fields`, rejecting anything unrecognized.
template <class Fn>
void each_key(const json& obj, const std::string& where, const std::set<std::string>& allowed,
              Fn&& fn) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(fmt::format("unknown key '{}' in {}", it.key(), where));
    fn(it.key(), it.value());
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

void read_catalog(const json& j, DeviceCatalog& c) {
  std::map<std::string, double*> fields{
      {"c_pv", &c.c_pv},         {"c_es", &c.c_es},       {"c_ic", &c.c_ic},
      {"c_inv", &c.c_inv},       {"c_con", &c.c_con},     {"c_deg", &c.c_deg},
      {"voll_cl", &c.voll_cl},   {"voll_nl", &c.voll_nl}, {"eta_ic", &c.eta_ic},
      {"eta_inv", &c.eta_inv},   {"eta_con", &c.eta_con}, {"eta_ch", &c.eta_ch},
      {"eta_dch", &c.eta_dch},   {"pv_max", &c.pv_max},   {"es_max", &c.es_max},
      {"rho_ep", &c.rho_ep},     {"alpha_min", &c.alpha_min}, {"alpha_max", &c.alpha_max}};
  std::set<std::string> allowed{"capital"};
  for (const auto& [k, _] : fields) allowed.insert(k);
  each_key(j, "catalog", allowed, [&](const std::string& key, const json& v) {
    if (key != "capital") *fields.at(key) = number(v, "catalog." + key);
  });
  if (!j.contains("capital")) return;
  // Raw capital costs ($/kW) annualized with the capital recovery factor.
  const json& cap = j.at("capital");
  double rate = 0.10;
  int years = 10;
  std::map<std::string, double*> prices{{"pv", &c.c_pv}, {"es", &c.c_es}, {"ic", &c.c_ic},
                                        {"inv", &c.c_inv}, {"con", &c.c_con}};
  each_key(cap, "catalog.capital", {"rate", "years", "pv", "es", "ic", "inv", "con"},
           [&](const std::string& key, const json& v) {
             if (key == "rate") rate = number(v, "catalog.capital.rate");
             if (key == "years") {
               if (!v.is_number_integer()) throw ConfigError("catalog.capital.years must be an integer");
               years = v.get<int>();
             }
           });
  if (years < 1 || rate < 0) throw ConfigError("catalog.capital needs years >= 1 and rate >= 0");
  const double crf = capital_recovery_factor(rate, years);
  for (const auto& [key, target] : prices) {
    if (cap.contains(key)) *target = number(cap.at(key), "catalog.capital." + key) * crf;
  }
}

void read_tariff(const json& j, TariffPlan& t) {
  each_key(j, "tariff", {"energy_price", "demand_price", "peak_cap"},
           [&](const std::string& key, const json& v) {
             if (key == "energy_price") {
               if (v.is_string()) {
                 if (v.get<std::string>() != "default_tou") {
                   throw ConfigError("tariff.energy_price must be a list or \"default_tou\"");
                 }
                 t.energy_price = TariffPlan::default_tou().energy_price;
               } else if (v.is_array()) {
                 t.energy_price.clear();
                 for (const auto& p : v) t.energy_price.push_back(number(p, "tariff.energy_price[]"));
               } else {
                 throw ConfigError("tariff.energy_price must be a list or \"default_tou\"");
               }
             } else if (key == "demand_price") {
               t.demand_price = number(v, "tariff.demand_price");
             } else {
               t.peak_cap = number(v, "tariff.peak_cap");
             }
           });
}

std::string fixed(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  return fmt::format("{:.6f}", v);
}

}  // namespace

StudyConfig parse_study_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  StudyConfig cfg;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  each_key(j, "study",
           {"profile", "output_dir", "cases", "reduction", "load_split", "catalog", "tariff",
            "annual_day_weight", "annual_demand_weight", "model", "solver", "write_lp"},
           [&](const std::string& key, const json& v) {
             if (key == "profile") {
               cfg.profile = resolve(v.get<std::string>());
             } else if (key == "output_dir") {
               cfg.output_dir = resolve(v.get<std::string>());
             } else if (key == "cases") {
               cfg.cases.clear();
               for (const auto& c : v) {
                 if (!c.is_number_integer()) throw ConfigError("cases must be integers");
                 cfg.cases.push_back(c.get<int>());
               }
             } else if (key == "reduction") {
               each_key(v, "reduction", {"k", "include_pv", "normalize", "method"},
                        [&](const std::string& k2, const json& v2) {
                          if (k2 == "k") {
                            if (!v2.is_number_integer() || v2.get<long>() < 1) {
                              throw ConfigError("reduction.k must be a positive integer");
                            }
                            cfg.reduction.k = v2.get<std::size_t>();
                          } else if (k2 == "include_pv") {
                            cfg.reduction.include_pv = v2.get<bool>();
                          } else if (k2 == "normalize") {
                            cfg.reduction.normalize = v2.get<bool>();
                          } else {
                            cfg.reduction.method = v2.get<std::string>();
                          }
                        });
             } else if (key == "load_split") {
               each_key(v, "load_split",
                        {"critical_fraction", "dc_fraction_of_critical", "dc_fraction_of_noncritical"},
                        [&](const std::string& k2, const json& v2) {
                          const double x = number(v2, "load_split." + k2);
                          if (k2 == "critical_fraction") cfg.split.critical_fraction = x;
                          if (k2 == "dc_fraction_of_critical") cfg.split.dc_fraction_of_critical = x;
                          if (k2 == "dc_fraction_of_noncritical") cfg.split.dc_fraction_of_noncritical = x;
                        });
             } else if (key == "catalog") {
               read_catalog(v, cfg.catalog);
             } else if (key == "tariff") {
               read_tariff(v, cfg.tariff);
             } else if (key == "annual_day_weight") {
               cfg.annual_day_weight = number(v, key);
             } else if (key == "annual_demand_weight") {
               cfg.annual_demand_weight = number(v, key);
             } else if (key == "model") {
               each_key(v, "model", {"soc_boundary", "initial_soc_fraction"},
                        [&](const std::string& k2, const json& v2) {
                          if (k2 == "soc_boundary") {
                            const auto s = v2.get<std::string>();
                            if (s == "cyclic") {
                              cfg.model.soc_boundary = SocBoundary::kCyclic;
                            } else if (s == "fixed") {
                              cfg.model.soc_boundary = SocBoundary::kFixedFraction;
                            } else {
                              throw ConfigError("model.soc_boundary must be \"cyclic\" or \"fixed\"");
                            }
                          } else {
                            cfg.model.initial_soc_fraction = number(v2, "model.initial_soc_fraction");
                          }
                        });
             } else if (key == "solver") {
               each_key(v, "solver", {"backend", "gap", "time_limit", "external_command"},
                        [&](const std::string& k2, const json& v2) {
                          if (k2 == "backend") cfg.solve.backend = parse_backend(v2.get<std::string>());
                          if (k2 == "gap") cfg.solve.relative_gap = number(v2, "solver.gap");
                          if (k2 == "time_limit") cfg.solve.time_limit = number(v2, "solver.time_limit");
                          if (k2 == "external_command") cfg.solve.external_command = v2.get<std::string>();
                        });
             } else if (key == "write_lp") {
               cfg.write_lp = v.get<bool>();
             }
           });
  if (cfg.profile.empty()) throw ConfigError("study.profile is required");
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_study_config(buf.str(), path.parent_path());
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ValidationReport validate_study_config(const StudyConfig& cfg) {
  ValidationReport r;
  if (cfg.cases.empty()) r.add("no cases requested");
  for (int c : cfg.cases) {
    if (c < 0 || c > 3) r.add(fmt::format("case {} is not one of 0,1,2,3", c));
  }
  if (!(cfg.solve.relative_gap >= 0)) r.add("solver gap must be nonnegative");
  if (!(cfg.annual_day_weight > 0) || !(cfg.annual_demand_weight > 0)) {
    r.add("annual weights must be positive");
  }
  r.merge(validate_catalog(cfg.catalog));
  r.merge(validate_tariff(cfg.tariff, kHoursPerDay));
  r.merge(validate_split(cfg.split));
  if (cfg.model.soc_boundary == SocBoundary::kFixedFraction &&
      (cfg.model.initial_soc_fraction < cfg.catalog.alpha_min ||
       cfg.model.initial_soc_fraction > cfg.catalog.alpha_max)) {
    r.add("model.initial_soc_fraction lies outside the SoC band");
  }
  if (!std::filesystem::exists(cfg.profile)) {
    r.add("profile not found: " + cfg.profile.string());
    return r;
  }
  try {
    const auto p = parse_profile_csv(cfg.profile);
    if (cfg.reduction.k > p.whole_days()) {
      r.add(fmt::format("reduction.k = {} exceeds the {} whole days in the profile",
                        cfg.reduction.k, p.whole_days()));
    }
    if (p.size() % kHoursPerDay != 0) {
      r.add(fmt::format("profile has {} trailing hours outside whole days", p.size() % kHoursPerDay));
    }
  } catch (const Error& e) {
    r.add(e.what());
  }
  return r;
}

bool CaseOutcome::solved() const {
  return error.empty() && solution.feasible() &&
         (solve.status == SolveStatus::kOptimal || solve.status == SolveStatus::kGapOptimal);
}

double savings_fraction(double base, double value) { return (base - value) / base; }

SavingsTable compare_cases(const std::map<int, CostBreakdown>& results) {
  SavingsTable t;
  t.components = {"energy_charges", "demand_charges", "total_payment", "investment",
                  "degradation",    "shedding",       "total"};
  auto parts = [](const CostBreakdown& b) {
    return std::vector<double>{b.energy_charges, b.demand_charges, b.payment(), b.investment,
                               b.degradation, b.shed_critical + b.shed_noncritical, b.total};
  };
  auto base_it = results.find(0);
  if (base_it == results.end()) return t;
  const auto base = parts(base_it->second);
  for (const auto& [k, b] : results) {
    if (k == 0) continue;
    const auto v = parts(b);
    std::vector<std::optional<double>> row;
    for (std::size_t i = 0; i < v.size(); ++i) {
      row.push_back(base[i] != 0.0 ? std::optional<double>(savings_fraction(base[i], v[i]))
                                   : std::nullopt);
    }
    t.by_case[k] = std::move(row);
  }
  return t;
}

namespace {

double annual_shed_kwh(const SizingSolution& s, const ScenarioSet& set, bool critical) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.scenarios.size(); ++i) {
    const auto& is = s.scenarios[i].island;
    double day = 0.0;
    for (std::size_t t = 0; t < is.lcl_ac.size(); ++t) {
      day += critical ? is.lcl_ac[t] + is.lcl_dc[t] : is.lnl_ac[t] + is.lnl_dc[t];
    }
    total += set.annual_day_weight * set.days[i].probability * day;
  }
  return total;
}

double max_grid(const SizingSolution& s) {
  double m = 0.0;
  for (const auto& d : s.scenarios) {
    for (double v : d.grid.p_grid) m = std::max(m, v);
  }
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<CaseOutcome>& cases,
                       const ScenarioSet& set) {
  out << "metric";
  for (const auto& c : cases) out << ",case_" << c.case_index;
  out << '\n';
  auto row = [&](const char* name, auto&& value) {
    out << name;
    for (const auto& c : cases) out << ',' << (c.solution.feasible() ? value(c) : std::string("n/a"));
    out << '\n';
  };
  out << "status";
  for (const auto& c : cases) out << ',' << (c.error.empty() ? to_string(c.solve.status) : "error");
  out << '\n';
  row("pv_kw", [](const CaseOutcome& c) { return fixed(c.solution.capacities.pv); });
  row("es_kw", [](const CaseOutcome& c) { return fixed(c.solution.capacities.es); });
  row("inverter_kw", [](const CaseOutcome& c) { return fixed(c.solution.capacities.inv); });
  row("converter_kw", [](const CaseOutcome& c) { return fixed(c.solution.capacities.con); });
  row("ic_kw", [](const CaseOutcome& c) { return fixed(c.solution.capacities.ic); });
  row("energy_charges", [](const CaseOutcome& c) { return fixed(c.solution.costs.energy_charges); });
  row("demand_charges", [](const CaseOutcome& c) { return fixed(c.solution.costs.demand_charges); });
  row("total_payment", [](const CaseOutcome& c) { return fixed(c.solution.costs.payment()); });
  row("shed_energy_kwh", [&](const CaseOutcome& c) {
    return fixed(annual_shed_kwh(c.solution, set, true) + annual_shed_kwh(c.solution, set, false));
  });
  row("shed_critical_kwh",
      [&](const CaseOutcome& c) { return fixed(annual_shed_kwh(c.solution, set, true)); });
  row("investment", [](const CaseOutcome& c) { return fixed(c.solution.costs.investment); });
  row("degradation", [](const CaseOutcome& c) { return fixed(c.solution.costs.degradation); });
  row("shedding_cost", [](const CaseOutcome& c) {
    return fixed(c.solution.costs.shed_critical + c.solution.costs.shed_noncritical);
  });
  row("total_cost", [](const CaseOutcome& c) { return fixed(c.solution.costs.total); });
  row("max_grid_kw", [](const CaseOutcome& c) { return fixed(max_grid(c.solution)); });
  row("gap", [](const CaseOutcome& c) { return fmt::format("{:.3e}", c.solution.achieved_gap); });
}

void write_savings_csv(std::ostream& out, const SavingsTable& table) {
  out << "component";
  for (const auto& [k, _] : table.by_case) out << ",case_" << k;
  out << '\n';
  for (std::size_t i = 0; i < table.components.size(); ++i) {
    out << table.components[i];
    for (const auto& [k, row] : table.by_case) {
      out << ',' << (row[i] ? fmt::format("{:.4f}", 100.0 * *row[i]) : std::string("n/a"));
    }
    out << '\n';
  }
}

void write_dispatch_csv(std::ostream& out, const ScenarioDispatch& d) {
  const auto& g = d.grid;
  out << "interval,grid_kw,pv_kw,es_dch_ac_kw,es_dch_dc_kw,es_ch_ac_kw,es_ch_dc_kw,ic_ac_kw,"
         "ic_dcin_kw,ic_dcout_kw,soc_kwh\n";
  for (std::size_t t = 0; t < g.p_grid.size(); ++t) {
    out << t;
    for (double v : {g.p_grid[t], g.v_dc[t], g.dch_ac[t], g.dch_dc[t], g.ch_ac[t], g.ch_dc[t],
                     g.f_ac[t], g.f_dcin[t], g.f_dcout[t], g.soc[t]}) {
      out << ',' << fixed(v);
    }
    out << '\n';
  }
}

void write_curtailment_csv(std::ostream& out, const SizingSolution& s) {
  out << "day,interval,critical_shed_kw,noncritical_shed_kw\n";
  for (const auto& d : s.scenarios) {
    const auto& is = d.island;
    for (std::size_t t = 0; t < is.lcl_ac.size(); ++t) {
      out << d.id << ',' << t << ',' << fixed(is.lcl_ac[t] + is.lcl_dc[t]) << ','
          << fixed(is.lnl_ac[t] + is.lnl_dc[t]) << '\n';
    }
  }
}

StudyOutcome run_study(const StudyConfig& cfg, std::ostream* log) {
  require_valid(validate_study_config(cfg), "study config");
  StudyOutcome outcome;
  const auto profile = parse_profile_csv(cfg.profile);
  outcome.scenarios = reduce_scenarios(profile, cfg.reduction, cfg.split);
  outcome.scenarios.annual_day_weight = cfg.annual_day_weight;
  outcome.scenarios.annual_demand_weight = cfg.annual_demand_weight;
  outcome.reconstruction_error = reconstruction_error(profile, outcome.scenarios);
  require_valid(validate_scenario_set(outcome.scenarios), "scenario set");
  const ScenarioSet& set = outcome.scenarios;

  std::vector<int> cases = cfg.cases;
  std::sort(cases.begin(), cases.end());
  cases.erase(std::unique(cases.begin(), cases.end()), cases.end());
  outcome.cases.resize(cases.size());
  std::vector<MilpInstance> instances(cases.size());
  std::vector<double> seconds(cases.size(), 0.0);

  auto work = [&](std::size_t i) {
    CaseOutcome& out = outcome.cases[i];
    out.case_index = cases[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto cs = CaseSpec::from_index(cases[i]);
      instances[i] = build_model(set, cfg.catalog, cfg.tariff, cs, cfg.model);
      SolveOptions opt = cfg.solve;
      opt.node_log = nullptr;
      out.solve = solve_milp(instances[i], opt);
      out.solution = extract_solution(instances[i], out.solve, set, cfg.catalog, cfg.tariff, cs,
                                      cfg.model);
      if (out.solution.feasible()) {
        out.audit = check_solution(out.solution, set, cfg.catalog, cfg.tariff);
      }
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < cases.size(); ++i) pool.emplace_back(work, i);
  }

  const auto& dir = cfg.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());

  bool solve_failure = false;
  bool audit_failure = false;
  std::map<int, CostBreakdown> breakdowns;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = outcome.cases[i];
    const int k = c.case_index;
    if (!c.solved()) solve_failure = true;
    if (c.audit && !c.audit->ok()) audit_failure = true;
    if (c.solution.feasible()) breakdowns[k] = c.solution.costs;
    if (cfg.write_lp && instances[i].num_columns() > 0) {
      std::ostringstream lp;
      write_lp(lp, instances[i]);
      write_file(dir / fmt::format("model_{}.lp", k), lp.str());
    }
    for (const auto& d : c.solution.scenarios) {
      std::ostringstream os;
      write_dispatch_csv(os, d);
      write_file(dir / fmt::format("dispatch_{}_{}.csv", k, d.id), os.str());
    }
    std::ostringstream curt;
    write_curtailment_csv(curt, c.solution);
    write_file(dir / fmt::format("curtailment_{}.csv", k), curt.str());
    std::string audit_text;
    if (c.audit) {
      audit_text = c.audit->to_string();
    } else {
      audit_text = c.error.empty() ? fmt::format("not audited: solver status {}\n", to_string(c.solve.status))
                                   : "not audited: " + c.error + "\n";
    }
    write_file(dir / fmt::format("audit_{}.txt", k), audit_text);
    if (log) {
      *log << fmt::format("case {}: {} objective {:.2f} gap {:.2e} nodes {} in {:.1f} s{}{}\n", k,
                          c.error.empty() ? to_string(c.solve.status) : "error", c.solve.objective,
                          c.solve.achieved_gap, c.solve.nodes, seconds[i],
                          c.audit ? (c.audit->ok() ? ", audit clean" : ", AUDIT VIOLATIONS") : "",
                          c.error.empty() ? "" : " (" + c.error + ")");
    }
  }

  std::ostringstream results;
  write_results_csv(results, outcome.cases, set);
  write_file(dir / "results.csv", results.str());
  std::ostringstream savings;
  write_savings_csv(savings, compare_cases(breakdowns));
  write_file(dir / "savings.csv", savings.str());
  std::ostringstream scen;
  write_reduction_csv(scen, set);
  write_file(dir / "scenarios.csv", scen.str());

  std::ostringstream rep;
  rep << "DER sizing study\n";
  rep << "Demand charges: demand price x the peak grid draw of each representative day, "
         "billed "
      << fmt::format("{}", set.annual_demand_weight)
      << " times per year (monthly billing convention).\n";
  rep << fmt::format("Energy, degradation and shedding: expected daily cost x {} days per year.\n",
                     set.annual_day_weight);
  rep << fmt::format("Representative days: {} (reconstruction error {:.3f} kW)\n", set.size(),
                     outcome.reconstruction_error);
  for (const auto& d : set.days) {
    rep << fmt::format("  {} day_index {} probability {:.6f}\n", d.id,
                       d.source_day ? static_cast<long>(*d.source_day) : -1L, d.probability);
  }
  for (const auto& c : outcome.cases) {
    rep << fmt::format("case {}: status {}", c.case_index,
                       c.error.empty() ? to_string(c.solve.status) : "error");
    if (c.solution.feasible()) {
      const auto& x = c.solution.capacities;
      rep << fmt::format(
          ", total {} $/yr, PV {} kW, ES {} kW, INV {} kW, CON {} kW, IC {} kW, gap {:.3e}",
          fixed(c.solution.costs.total), fixed(x.pv), fixed(x.es), fixed(x.inv), fixed(x.con),
          fixed(x.ic), c.solution.achieved_gap);
    }
    if (c.audit) rep << (c.audit->ok() ? ", audit clean" : ", audit violations");
    if (!c.error.empty()) rep << ", " << c.error;
    rep << '\n';
  }
  write_file(dir / "report.txt", rep.str());

  outcome.exit_code = solve_failure ? kExitSolveFailure : audit_failure ? kExitAuditViolation : kExitOk;
  return outcome;
}

}  // namespace dersizer
