#include "dersizer/audit.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "dersizer/errors.hpp"

namespace dersizer {

std::string AuditReport::to_string() const {
  std::string out = fmt::format(
      "checks {}\nviolations {}\nmax_residual {:.6g}\nobjective_recomputed {:.6f}\n"
      "objective_delta {:.6g}\n",
      checks, violations.size(), max_residual, objective_recomputed, objective_delta);
  out += fmt::format(
      "investment {:.6f}\nenergy_charges {:.6f}\ndemand_charges {:.6f}\ndegradation {:.6f}\n"
      "shed_critical {:.6f}\nshed_noncritical {:.6f}\ntotal {:.6f}\n",
      costs.investment, costs.energy_charges, costs.demand_charges, costs.degradation,
      costs.shed_critical, costs.shed_noncritical, costs.total);
  for (const auto& v : violations) {
    out += fmt::format("violation {} s={} t={} residual={:.6g}\n", v.family, v.scenario,
                       v.interval, v.residual);
  }
  return out;
}

namespace {

enum class Cmp { kEq, kLe, kGe };

class Checker {
 public:
  Checker(AuditReport& report, double tol) : r_(report), tol_(tol) {}

  void check(const char* family, int s, int t, double lhs, Cmp cmp, double rhs) {
    ++r_.checks;
    const double scale = std::max(1.0, std::abs(rhs));
    double excess = 0.0;
    switch (cmp) {
      case Cmp::kEq: excess = std::abs(lhs - rhs); break;
      case Cmp::kLe: excess = lhs - rhs; break;
      case Cmp::kGe: excess = rhs - lhs; break;
    }
    const double scaled = std::isfinite(excess) ? excess / scale : INFINITY;
    r_.max_residual = std::max(r_.max_residual, scaled);
    if (!(scaled <= tol_)) r_.violations.push_back({family, s, t, scaled});
  }

 private:
  AuditReport& r_;
  double tol_;
};

void require_length(const Series& v, std::size_t T, const char* what, const std::string& id) {
  if (v.size() != T) {
    throw AuditError(fmt::format("scenario '{}': {} has {} entries, expected {}", id, what,
                                 v.size(), T));
  }
}

}  // namespace

CostBreakdown recompute_cost_breakdown(const SizingSolution& solution, const ScenarioSet& set,
                                       const DeviceCatalog& catalog, const TariffPlan& tariff) {
  CostBreakdown b;
  const auto& x = solution.capacities;
  b.investment = catalog.c_pv * x.pv + catalog.c_es * x.es + catalog.c_ic * x.ic +
                 catalog.c_inv * x.inv + catalog.c_con * x.con;
  for (std::size_t s = 0; s < solution.scenarios.size(); ++s) {
    const auto& g = solution.scenarios[s].grid;
    const auto& i = solution.scenarios[s].island;
    const double pi = set.days.at(s).probability;
    double energy = 0.0;
    double throughput = 0.0;
    double cl = 0.0;
    double nl = 0.0;
    for (std::size_t t = 0; t < g.p_grid.size(); ++t) {
      energy += tariff.energy_price[t] * g.p_grid[t];
      throughput += g.dch_ac[t] + g.dch_dc[t] + g.ch_ac[t] + g.ch_dc[t];
      cl += i.lcl_ac[t] + i.lcl_dc[t];
      nl += i.lnl_ac[t] + i.lnl_dc[t];
    }
    const double days = set.annual_day_weight * pi;
    b.energy_charges += days * energy;
    b.demand_charges += set.annual_demand_weight * pi * tariff.demand_price * g.peak;
    b.degradation += days * catalog.c_deg * throughput;
    b.shed_critical += days * catalog.voll_cl * cl;
    b.shed_noncritical += days * catalog.voll_nl * nl;
  }
  b.total = b.investment + b.energy_charges + b.demand_charges + b.degradation +
            b.shed_critical + b.shed_noncritical;
  return b;
}

AuditReport check_solution(const SizingSolution& solution, const ScenarioSet& set,
                           const DeviceCatalog& c, const TariffPlan& tariff, double tol) {
  const std::size_t S = set.size();
  const std::size_t T = set.intervals();
  if (solution.scenarios.size() != S) {
    throw AuditError(fmt::format("solution has {} dispatch blocks for {} scenarios",
                                 solution.scenarios.size(), S));
  }
  for (const auto& d : solution.scenarios) {
    const auto& g = d.grid;
    const auto& i = d.island;
    for (const auto& [v, name] :
         {std::pair{&g.p_grid, "p_grid"}, {&g.v_dc, "v_dc"}, {&g.f_ac, "f_ac"},
          {&g.f_dcin, "f_dcin"}, {&g.f_dcout, "f_dcout"}, {&g.z_dc, "z_dc"},
          {&g.dch_ac, "dch_ac"}, {&g.dch_dc, "dch_dc"}, {&g.ch_ac, "ch_ac"},
          {&g.ch_dc, "ch_dc"}, {&g.soc, "soc"}, {&g.y_es, "y_es"}, {&g.u_es, "u_es"},
          {&g.kappa_es, "kappa_es"}, {&i.vi_dc, "vi_dc"}, {&i.dchi_ac, "dchi_ac"},
          {&i.dchi_dc, "dchi_dc"}, {&i.fi_ac, "fi_ac"}, {&i.fi_dcin, "fi_dcin"},
          {&i.fi_dcout, "fi_dcout"}, {&i.zi_dc, "zi_dc"}, {&i.lcl_ac, "lcl_ac"},
          {&i.lcl_dc, "lcl_dc"}, {&i.lnl_ac, "lnl_ac"}, {&i.lnl_dc, "lnl_dc"}}) {
      require_length(*v, T, name, d.id);
    }
  }

  AuditReport report;
  Checker ck(report, tol);
  const auto& x = solution.capacities;
  const double M = solution.big_m.m_flow;
  const double Mes = solution.big_m.m_es;
  const bool pv_on = solution.case_spec.allow_pv;
  const bool es_on = solution.case_spec.allow_es;

  // capacities
  for (double v : {x.pv, x.es, x.ic, x.inv, x.con}) ck.check("bounds", -1, -1, v, Cmp::kGe, 0.0);
  ck.check("pv-cap", -1, -1, x.pv, Cmp::kLe, pv_on ? c.pv_max : 0.0);
  ck.check("es-cap", -1, -1, x.es, Cmp::kLe, es_on ? c.es_max : 0.0);
  if (!es_on) ck.check("bounds", -1, -1, x.inv, Cmp::kLe, 0.0);

  auto binary = [&](int s, int t, double b) {
    ck.check("binary", s, t, std::min(std::abs(b), std::abs(1.0 - b)), Cmp::kLe, 0.0);
  };

  for (std::size_t si = 0; si < S; ++si) {
    const int s = static_cast<int>(si);
    const auto& day = set.days[si];
    const auto& g = solution.scenarios[si].grid;
    const auto& is = solution.scenarios[si].island;

    ck.check("bounds", s, -1, g.peak, Cmp::kGe, 0.0);
    ck.check("peak-cap", s, -1, g.peak, Cmp::kLe, tariff.peak_cap);

    for (std::size_t ti = 0; ti < T; ++ti) {
      const int t = static_cast<int>(ti);
      const double cl_ac = day.cl_ac[ti], cl_dc = day.cl_dc[ti];
      const double nl_ac = day.nl_ac[ti], nl_dc = day.nl_dc[ti];
      const double V = day.pv_availability[ti];
      const double soc_before = ti == 0 ? g.soc_init : g.soc[ti - 1];

      // nonnegativity of every one-signed quantity
      for (double v : {g.p_grid[ti], g.v_dc[ti], g.f_dcin[ti], g.f_dcout[ti], g.dch_ac[ti],
                       g.dch_dc[ti], g.ch_ac[ti], g.ch_dc[ti], g.soc[ti], g.u_es[ti],
                       g.kappa_es[ti], is.vi_dc[ti], is.dchi_ac[ti], is.dchi_dc[ti],
                       is.fi_dcin[ti], is.fi_dcout[ti], is.lcl_ac[ti], is.lcl_dc[ti],
                       is.lnl_ac[ti], is.lnl_dc[ti]}) {
        ck.check("bounds", s, t, v, Cmp::kGe, 0.0);
      }
      binary(s, t, g.z_dc[ti]);
      binary(s, t, is.zi_dc[ti]);
      if (es_on) binary(s, t, g.y_es[ti]);

      // grid-connected buses and interfacing converter
      ck.check("ac-balance", s, t,
               g.dch_ac[ti] * c.eta_inv - g.ch_ac[ti] / c.eta_inv + g.p_grid[ti], Cmp::kEq,
               g.f_ac[ti] + cl_ac + nl_ac);
      ck.check("dc-balance", s, t, (g.dch_dc[ti] + g.v_dc[ti]) * c.eta_con - g.ch_dc[ti] / c.eta_con,
               Cmp::kEq, g.f_dcout[ti] - g.f_dcin[ti] + cl_dc + nl_dc);
      ck.check("ic-coupling", s, t, g.f_ac[ti], Cmp::kEq,
               g.f_dcin[ti] / c.eta_ic - g.f_dcout[ti] * c.eta_ic);
      ck.check("ic-in-switch", s, t, g.f_dcin[ti], Cmp::kLe, g.z_dc[ti] * M);
      ck.check("ic-out-switch", s, t, g.f_dcout[ti], Cmp::kLe, (1.0 - g.z_dc[ti]) * M);

      // storage
      ck.check("soc-min", s, t, g.soc[ti], Cmp::kGe, c.alpha_min * c.rho_ep * x.es);
      ck.check("soc-max", s, t, g.soc[ti], Cmp::kLe, c.alpha_max * c.rho_ep * x.es);
      ck.check("soc-transition", s, t, g.soc[ti], Cmp::kEq,
               soc_before + (g.ch_ac[ti] + g.ch_dc[ti]) * c.eta_ch -
                   (g.dch_ac[ti] + g.dch_dc[ti]) / c.eta_dch);
      const double dch = g.dch_ac[ti] + g.dch_dc[ti];
      const double ch = g.ch_ac[ti] + g.ch_dc[ti];
      ck.check("dch-limit", s, t, dch, Cmp::kLe, x.es * g.y_es[ti]);
      ck.check("ch-limit", s, t, ch, Cmp::kLe, x.es * (1.0 - g.y_es[ti]));
      ck.check("aux-definition", s, t, g.u_es[ti], Cmp::kEq, x.es - g.kappa_es[ti]);
      ck.check("aux-on", s, t, g.u_es[ti], Cmp::kLe, Mes * g.y_es[ti]);
      ck.check("aux-off", s, t, g.kappa_es[ti], Cmp::kLe, Mes * (1.0 - g.y_es[ti]));
      ck.check("aux-product", s, t, std::abs(g.u_es[ti] - x.es * g.y_es[ti]) / std::max(1.0, c.es_max),
               Cmp::kLe, 0.0);
      ck.check("complementarity", s, t, std::min(dch, ch) / std::max(1.0, c.es_max), Cmp::kLe,
               0.0);
      ck.check("complementarity", s, t,
               std::min(g.f_dcin[ti], g.f_dcout[ti]) / std::max(1.0, M), Cmp::kLe, 0.0);

      ck.check("pv-available", s, t, g.v_dc[ti], Cmp::kLe, V * x.pv);
      ck.check("peak-tracking", s, t, g.p_grid[ti], Cmp::kLe, g.peak);

      // islanded contingency
      ck.check("isl-ac-balance", s, t, is.dchi_ac[ti] * c.eta_inv, Cmp::kEq,
               is.fi_ac[ti] + cl_ac - is.lcl_ac[ti] + nl_ac - is.lnl_ac[ti]);
      ck.check("isl-dc-balance", s, t, (is.dchi_dc[ti] + is.vi_dc[ti]) * c.eta_con, Cmp::kEq,
               is.fi_dcout[ti] - is.fi_dcin[ti] + cl_dc - is.lcl_dc[ti] + nl_dc - is.lnl_dc[ti]);
      ck.check("shed-bounds", s, t, is.lcl_ac[ti], Cmp::kLe, cl_ac);
      ck.check("shed-bounds", s, t, is.lnl_ac[ti], Cmp::kLe, nl_ac);
      ck.check("shed-bounds", s, t, is.lcl_dc[ti], Cmp::kLe, cl_dc);
      ck.check("shed-bounds", s, t, is.lnl_dc[ti], Cmp::kLe, nl_dc);
      ck.check("isl-ic-coupling", s, t, is.fi_ac[ti], Cmp::kEq,
               is.fi_dcin[ti] / c.eta_ic - is.fi_dcout[ti] * c.eta_ic);
      ck.check("isl-ic-in-switch", s, t, is.fi_dcin[ti], Cmp::kLe, is.zi_dc[ti] * M);
      ck.check("isl-ic-out-switch", s, t, is.fi_dcout[ti], Cmp::kLe, (1.0 - is.zi_dc[ti]) * M);
      ck.check("complementarity", s, t,
               std::min(is.fi_dcin[ti], is.fi_dcout[ti]) / std::max(1.0, M), Cmp::kLe, 0.0);
      ck.check("isl-pv-available", s, t, is.vi_dc[ti], Cmp::kLe, V * x.pv);
      ck.check("isl-dch-power", s, t, is.dchi_ac[ti] + is.dchi_dc[ti], Cmp::kLe, x.es);
      ck.check("isl-dch-energy", s, t, is.dchi_ac[ti] + is.dchi_dc[ti], Cmp::kLe, soc_before);

      // converter ratings
      ck.check("inv-grid", s, t, x.inv, Cmp::kGe, g.dch_ac[ti] + g.ch_ac[ti] / c.eta_inv);
      ck.check("inv-isl", s, t, x.inv, Cmp::kGe, is.dchi_ac[ti]);
      ck.check("con-grid", s, t, x.con, Cmp::kGe, x.pv + g.dch_dc[ti] + g.ch_dc[ti] / c.eta_con);
      ck.check("con-isl", s, t, x.con, Cmp::kGe, x.pv + is.dchi_dc[ti]);
      ck.check("ic-grid-in", s, t, x.ic, Cmp::kGe, g.f_dcin[ti] / c.eta_ic);
      ck.check("ic-grid-out", s, t, x.ic, Cmp::kGe, g.f_dcout[ti]);
      ck.check("ic-isl-in", s, t, x.ic, Cmp::kGe, is.fi_dcin[ti] / c.eta_ic);
      ck.check("ic-isl-out", s, t, x.ic, Cmp::kGe, is.fi_dcout[ti]);
    }

    if (es_on) {
      if (solution.options.soc_boundary == SocBoundary::kCyclic) {
        ck.check("soc-boundary", s, -1, g.soc_init, Cmp::kEq, T ? g.soc[T - 1] : g.soc_init);
      } else {
        ck.check("soc-boundary", s, -1, g.soc_init, Cmp::kEq,
                 solution.options.initial_soc_fraction * c.rho_ep * x.es);
      }
      ck.check("soc-min", s, -1, g.soc_init, Cmp::kGe, c.alpha_min * c.rho_ep * x.es);
      ck.check("soc-max", s, -1, g.soc_init, Cmp::kLe, c.alpha_max * c.rho_ep * x.es);
    } else {
      ck.check("soc-boundary", s, -1, g.soc_init, Cmp::kEq, 0.0);
    }
  }

  report.costs = recompute_cost_breakdown(solution, set, c, tariff);
  report.objective_recomputed = report.costs.total;
  report.objective_delta = std::abs(report.objective_recomputed - solution.objective);
  ck.check("objective", -1, -1, report.objective_recomputed, Cmp::kEq, solution.objective);
  return report;
}

}  // namespace dersizer
