#include "dersizer/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "dersizer/errors.hpp"

namespace dersizer {

CaseSpec CaseSpec::from_index(int index) {
  if (index < 0 || index > 3) throw ConfigError(fmt::format("unknown case {}", index));
  return CaseSpec{(index & 1) != 0, (index & 2) != 0};
}

const char* to_string(RowFamily f) {
  switch (f) {
    case RowFamily::kUntagged: return "untagged";
    case RowFamily::kAcBalance: return "ac-balance";
    case RowFamily::kDcBalance: return "dc-balance";
    case RowFamily::kIcCoupling: return "ic-coupling";
    case RowFamily::kIcInSwitch: return "ic-in-switch";
    case RowFamily::kIcOutSwitch: return "ic-out-switch";
    case RowFamily::kSocMin: return "soc-min";
    case RowFamily::kSocMax: return "soc-max";
    case RowFamily::kSocTransition: return "soc-transition";
    case RowFamily::kSocBoundary: return "soc-boundary";
    case RowFamily::kPvAvailable: return "pv-available";
    case RowFamily::kPeakTracking: return "peak-tracking";
    case RowFamily::kIslAcBalance: return "isl-ac-balance";
    case RowFamily::kIslDcBalance: return "isl-dc-balance";
    case RowFamily::kIslIcCoupling: return "isl-ic-coupling";
    case RowFamily::kIslIcInSwitch: return "isl-ic-in-switch";
    case RowFamily::kIslIcOutSwitch: return "isl-ic-out-switch";
    case RowFamily::kIslPvAvailable: return "isl-pv-available";
    case RowFamily::kIslDchPower: return "isl-dch-power";
    case RowFamily::kIslDchEnergy: return "isl-dch-energy";
    case RowFamily::kInvGrid: return "inv-grid";
    case RowFamily::kInvIsl: return "inv-isl";
    case RowFamily::kConGrid: return "con-grid";
    case RowFamily::kConIsl: return "con-isl";
    case RowFamily::kIcGridIn: return "ic-grid-in";
    case RowFamily::kIcGridOut: return "ic-grid-out";
    case RowFamily::kIcIslIn: return "ic-isl-in";
    case RowFamily::kIcIslOut: return "ic-isl-out";
    case RowFamily::kAuxDefinition: return "aux-definition";
    case RowFamily::kAuxOn: return "aux-on";
    case RowFamily::kAuxOff: return "aux-off";
    case RowFamily::kDchLimit: return "dch-limit";
    case RowFamily::kChLimit: return "ch-limit";
  }
  return "?";
}

BigM compute_big_m(const ScenarioSet& set, const DeviceCatalog& catalog) {
  double peak_load = 0.0;
  for (const auto& day : set.days) {
    for (std::size_t t = 0; t < day.intervals(); ++t) peak_load = std::max(peak_load, day.total_load(t));
  }
  BigM m;
  m.m_es = catalog.es_max;
  const double stated =
      peak_load + catalog.pv_max * catalog.eta_con + catalog.es_max * catalog.eta_dch;
  const double dc_import = peak_load + catalog.es_max / catalog.eta_con;
  const double dc_export = (catalog.pv_max + catalog.es_max) * catalog.eta_con;
  m.m_flow = std::max({stated, dc_import, dc_export});
  return m;
}

ModelDimensions model_dimensions(std::size_t scenarios, std::size_t intervals, CaseSpec c) {
  const long s = static_cast<long>(scenarios);
  const long st = s * static_cast<long>(intervals);
  ModelDimensions d;
  if (c.allow_es) {
    d.columns = 5 + 2 * s + 25 * st;
    d.rows = s + 31 * st;
    d.binaries = 3 * st;
  } else {
    d.columns = 5 + s + 15 * st;
    d.rows = 19 * st;
    d.binaries = 2 * st;
  }
  return d;
}

namespace {

std::string indexed(const char* base, int s, int t) {
  if (s < 0) return base;
  if (t < 0) return fmt::format("{}_s{}", base, s);
  return fmt::format("{}_s{}_t{}", base, s, t);
}

class Builder {
 public:
  explicit Builder(MilpInstance& m) : m_(m) {}

  int col(Symbol sym, int s, int t, double lo, double up, double cost = 0.0, bool binary = false) {
    Column c;
    c.name = indexed(symbol_name(sym), s, t);
    c.lower = lo;
    c.upper = up;
    c.cost = cost;
    c.integer = binary;
    c.key = SymbolKey{sym, s, t};
    return m_.add_column(std::move(c));
  }

  int row(RowFamily f, const char* tag, int s, int t, RowSense sense, double rhs,
          std::initializer_list<std::pair<int, double>> terms) {
    Row r;
    r.name = indexed(tag, s, t);
    r.sense = sense;
    r.rhs = rhs;
    r.family = static_cast<int>(f);
    for (const auto& [j, a] : terms) {
      r.index.push_back(j);
      r.value.push_back(a);
    }
    return m_.add_row(std::move(r));
  }

 private:
  MilpInstance& m_;
};

void check_inputs(const ScenarioSet& set, const DeviceCatalog& c, const TariffPlan& tariff,
                  const ModelOptions& options) {
  if (set.days.empty()) throw BuildError("scenario set is empty");
  const std::size_t T = set.intervals();
  if (T == 0) throw BuildError(fmt::format("scenario '{}' has no intervals", set.days[0].id));
  for (const auto& d : set.days) {
    for (const Series* v : {&d.cl_ac, &d.cl_dc, &d.nl_ac, &d.nl_dc, &d.pv_availability}) {
      if (v->size() != T) {
        throw BuildError(fmt::format("scenario '{}' has a series of length {} (expected {})",
                                     d.id, v->size(), T));
      }
    }
  }
  if (tariff.energy_price.size() != T) {
    throw BuildError(fmt::format("tariff has {} prices for {} intervals",
                                 tariff.energy_price.size(), T));
  }
  for (double eta : {c.eta_ic, c.eta_inv, c.eta_con, c.eta_ch, c.eta_dch}) {
    if (!(eta > 0.0) || eta > 1.0) {
      throw BuildError(fmt::format("efficiency {} is outside (0, 1]", eta));
    }
  }
  if (c.pv_max < 0 || c.es_max < 0 || !(c.rho_ep > 0)) {
    throw BuildError("capacity caps must be nonnegative and rho_ep positive");
  }
  if (options.soc_boundary == SocBoundary::kFixedFraction &&
      (options.initial_soc_fraction < c.alpha_min || options.initial_soc_fraction > c.alpha_max)) {
    throw BuildError(fmt::format("initial SoC fraction {} is outside [{}, {}]",
                                 options.initial_soc_fraction, c.alpha_min, c.alpha_max));
  }
}

}  // namespace

ProductColumns linearize_product(MilpInstance& instance, int x_col, int y_col, double m,
                                 const SymbolKey& u_key, const SymbolKey& kappa_key,
                                 const std::string& suffix) {
  const auto& cols = instance.columns();
  if (!cols.at(y_col).integer || cols[y_col].lower < 0.0 || cols[y_col].upper > 1.0) {
    throw BuildError("column '" + cols[y_col].name + "' is not binary");
  }
  if (m < cols.at(x_col).upper) {
    throw BuildError(fmt::format("big-M {} is below the upper bound {} of '{}'", m,
                                 cols[x_col].upper, cols[x_col].name));
  }
  if (cols[x_col].lower < 0.0) {
    throw BuildError("column '" + cols[x_col].name + "' may be negative");
  }
  ProductColumns out;
  Column u;
  u.name = std::string(symbol_name(u_key.symbol)) + suffix;
  u.lower = 0.0;
  u.upper = m;
  u.key = u_key;
  out.u = instance.add_column(std::move(u));
  Column k;
  k.name = std::string(symbol_name(kappa_key.symbol)) + suffix;
  k.lower = 0.0;
  k.upper = m;
  k.key = kappa_key;
  out.kappa = instance.add_column(std::move(k));

  auto add = [&](RowFamily f, const char* tag, RowSense sense, double rhs,
                 std::vector<int> idx, std::vector<double> val) {
    Row r;
    r.name = tag + suffix;
    r.sense = sense;
    r.rhs = rhs;
    r.family = static_cast<int>(f);
    r.index = std::move(idx);
    r.value = std::move(val);
    out.rows.push_back(instance.add_row(std::move(r)));
  };
  // u - x + kappa = 0
  add(RowFamily::kAuxDefinition, "aux_def", RowSense::kEq, 0.0, {out.u, x_col, out.kappa},
      {1.0, -1.0, 1.0});
  // u - m y <= 0
  add(RowFamily::kAuxOn, "aux_on", RowSense::kLe, 0.0, {out.u, y_col}, {1.0, -m});
  // kappa + m y <= m
  add(RowFamily::kAuxOff, "aux_off", RowSense::kLe, m, {out.kappa, y_col}, {1.0, m});
  return out;
}

MilpInstance build_model(const ScenarioSet& set, const DeviceCatalog& catalog,
                         const TariffPlan& tariff, CaseSpec case_spec,
                         const ModelOptions& options) {
  check_inputs(set, catalog, tariff, options);
  const DeviceCatalog& c = catalog;
  const int S = static_cast<int>(set.size());
  const int T = static_cast<int>(set.intervals());
  const bool es = case_spec.allow_es;
  BigM big = compute_big_m(set, c);
  const double M = big.m_flow > 0.0 ? big.m_flow : 1.0;
  const double Mes = big.m_es;

  MilpInstance inst;
  Builder b(inst);
  constexpr auto kLe = RowSense::kLe;
  constexpr auto kEq = RowSense::kEq;
  constexpr auto kGe = RowSense::kGe;

  const double pv_cap = case_spec.allow_pv ? c.pv_max : 0.0;
  const double es_cap = es ? c.es_max : 0.0;
  const double energy_cap = c.alpha_max * c.rho_ep * c.es_max;

  const int x_pv = b.col(Symbol::kXPv, -1, -1, 0.0, pv_cap, c.c_pv);
  const int x_es = b.col(Symbol::kXEs, -1, -1, 0.0, es_cap, c.c_es);
  const int x_ic = b.col(Symbol::kXIc, -1, -1, 0.0, M / c.eta_ic, c.c_ic);
  const int x_inv = b.col(Symbol::kXInv, -1, -1, 0.0, es ? c.es_max / c.eta_inv : 0.0, c.c_inv);
  const int x_con = b.col(Symbol::kXCon, -1, -1, 0.0, c.pv_max + c.es_max / c.eta_con, c.c_con);

  for (int s = 0; s < S; ++s) {
    const DayScenario& day = set.days[s];
    const double w_energy = annual_weight(set, s, CostKind::kEnergy);
    const double w_demand = annual_weight(set, s, CostKind::kDemand);
    const double w_deg = annual_weight(set, s, CostKind::kDegradation);
    const double w_shed = annual_weight(set, s, CostKind::kShedding);
    const double deg = w_deg * c.c_deg;

    const int peak =
        b.col(Symbol::kPeak, s, -1, 0.0, tariff.peak_cap, w_demand * tariff.demand_price);
    int soc_prev = -1;
    int soc_init = -1;
    if (es) {
      soc_init = b.col(Symbol::kSocInit, s, -1, 0.0, energy_cap);
      soc_prev = soc_init;
    }

    for (int t = 0; t < T; ++t) {
      const double cl_ac = day.cl_ac[t];
      const double cl_dc = day.cl_dc[t];
      const double nl_ac = day.nl_ac[t];
      const double nl_dc = day.nl_dc[t];
      const double avail = day.pv_availability[t];

      // grid-connected block
      const int grid =
          b.col(Symbol::kGrid, s, t, 0.0, tariff.peak_cap, w_energy * tariff.energy_price[t]);
      const int v = b.col(Symbol::kPv, s, t, 0.0, avail * c.pv_max);
      const int f_ac = b.col(Symbol::kFlowAc, s, t, -M * c.eta_ic, M / c.eta_ic);
      const int f_in = b.col(Symbol::kFlowDcIn, s, t, 0.0, M);
      const int f_out = b.col(Symbol::kFlowDcOut, s, t, 0.0, M);
      const int z = b.col(Symbol::kFlowDir, s, t, 0.0, 1.0, 0.0, true);
      int dch_ac = -1, dch_dc = -1, ch_ac = -1, ch_dc = -1, soc = -1, y = -1;
      if (es) {
        dch_ac = b.col(Symbol::kDchAc, s, t, 0.0, c.es_max, deg);
        dch_dc = b.col(Symbol::kDchDc, s, t, 0.0, c.es_max, deg);
        ch_ac = b.col(Symbol::kChAc, s, t, 0.0, c.es_max, deg);
        ch_dc = b.col(Symbol::kChDc, s, t, 0.0, c.es_max, deg);
        soc = b.col(Symbol::kSoc, s, t, 0.0, energy_cap);
        y = b.col(Symbol::kDchState, s, t, 0.0, 1.0, 0.0, true);
      }

      if (es) {
        b.row(RowFamily::kAcBalance, "bal_ac", s, t, kEq, cl_ac + nl_ac,
              {{dch_ac, c.eta_inv}, {ch_ac, -1.0 / c.eta_inv}, {grid, 1.0}, {f_ac, -1.0}});
        b.row(RowFamily::kDcBalance, "bal_dc", s, t, kEq, cl_dc + nl_dc,
              {{dch_dc, c.eta_con},
               {v, c.eta_con},
               {ch_dc, -1.0 / c.eta_con},
               {f_out, -1.0},
               {f_in, 1.0}});
      } else {
        b.row(RowFamily::kAcBalance, "bal_ac", s, t, kEq, cl_ac + nl_ac,
              {{grid, 1.0}, {f_ac, -1.0}});
        b.row(RowFamily::kDcBalance, "bal_dc", s, t, kEq, cl_dc + nl_dc,
              {{v, c.eta_con}, {f_out, -1.0}, {f_in, 1.0}});
      }
      b.row(RowFamily::kIcCoupling, "ic", s, t, kEq, 0.0,
            {{f_ac, 1.0}, {f_in, -1.0 / c.eta_ic}, {f_out, c.eta_ic}});
      b.row(RowFamily::kIcInSwitch, "ic_in", s, t, kLe, 0.0, {{f_in, 1.0}, {z, -M}});
      b.row(RowFamily::kIcOutSwitch, "ic_out", s, t, kLe, M, {{f_out, 1.0}, {z, M}});
      if (es) {
        b.row(RowFamily::kSocMin, "soc_min", s, t, kGe, 0.0,
              {{soc, 1.0}, {x_es, -c.alpha_min * c.rho_ep}});
        b.row(RowFamily::kSocMax, "soc_max", s, t, kLe, 0.0,
              {{soc, 1.0}, {x_es, -c.alpha_max * c.rho_ep}});
        b.row(RowFamily::kSocTransition, "soc_step", s, t, kEq, 0.0,
              {{soc, 1.0},
               {soc_prev, -1.0},
               {ch_ac, -c.eta_ch},
               {ch_dc, -c.eta_ch},
               {dch_ac, 1.0 / c.eta_dch},
               {dch_dc, 1.0 / c.eta_dch}});
      }
      b.row(RowFamily::kPvAvailable, "pv_avail", s, t, kLe, 0.0, {{v, 1.0}, {x_pv, -avail}});
      b.row(RowFamily::kPeakTracking, "peak", s, t, kLe, 0.0, {{grid, 1.0}, {peak, -1.0}});

      // islanded contingency block
      const int vi = b.col(Symbol::kIslPv, s, t, 0.0, avail * c.pv_max);
      int dchi_ac = -1, dchi_dc = -1;
      if (es) {
        dchi_ac = b.col(Symbol::kIslDchAc, s, t, 0.0, c.es_max);
        dchi_dc = b.col(Symbol::kIslDchDc, s, t, 0.0, c.es_max);
      }
      const int fi_ac = b.col(Symbol::kIslFlowAc, s, t, -M * c.eta_ic, M / c.eta_ic);
      const int fi_in = b.col(Symbol::kIslFlowDcIn, s, t, 0.0, M);
      const int fi_out = b.col(Symbol::kIslFlowDcOut, s, t, 0.0, M);
      const int zi = b.col(Symbol::kIslFlowDir, s, t, 0.0, 1.0, 0.0, true);
      const int lcl_ac = b.col(Symbol::kShedClAc, s, t, 0.0, cl_ac, w_shed * c.voll_cl);
      const int lcl_dc = b.col(Symbol::kShedClDc, s, t, 0.0, cl_dc, w_shed * c.voll_cl);
      const int lnl_ac = b.col(Symbol::kShedNlAc, s, t, 0.0, nl_ac, w_shed * c.voll_nl);
      const int lnl_dc = b.col(Symbol::kShedNlDc, s, t, 0.0, nl_dc, w_shed * c.voll_nl);

      if (es) {
        b.row(RowFamily::kIslAcBalance, "isl_bal_ac", s, t, kEq, cl_ac + nl_ac,
              {{dchi_ac, c.eta_inv}, {fi_ac, -1.0}, {lcl_ac, 1.0}, {lnl_ac, 1.0}});
        b.row(RowFamily::kIslDcBalance, "isl_bal_dc", s, t, kEq, cl_dc + nl_dc,
              {{dchi_dc, c.eta_con},
               {vi, c.eta_con},
               {fi_out, -1.0},
               {fi_in, 1.0},
               {lcl_dc, 1.0},
               {lnl_dc, 1.0}});
      } else {
        b.row(RowFamily::kIslAcBalance, "isl_bal_ac", s, t, kEq, cl_ac + nl_ac,
              {{fi_ac, -1.0}, {lcl_ac, 1.0}, {lnl_ac, 1.0}});
        b.row(RowFamily::kIslDcBalance, "isl_bal_dc", s, t, kEq, cl_dc + nl_dc,
              {{vi, c.eta_con}, {fi_out, -1.0}, {fi_in, 1.0}, {lcl_dc, 1.0}, {lnl_dc, 1.0}});
      }
      b.row(RowFamily::kIslIcCoupling, "isl_ic", s, t, kEq, 0.0,
            {{fi_ac, 1.0}, {fi_in, -1.0 / c.eta_ic}, {fi_out, c.eta_ic}});
      b.row(RowFamily::kIslIcInSwitch, "isl_ic_in", s, t, kLe, 0.0, {{fi_in, 1.0}, {zi, -M}});
      b.row(RowFamily::kIslIcOutSwitch, "isl_ic_out", s, t, kLe, M, {{fi_out, 1.0}, {zi, M}});
      b.row(RowFamily::kIslPvAvailable, "isl_pv_avail", s, t, kLe, 0.0,
            {{vi, 1.0}, {x_pv, -avail}});
      if (es) {
        b.row(RowFamily::kIslDchPower, "isl_dch_power", s, t, kLe, 0.0,
              {{dchi_ac, 1.0}, {dchi_dc, 1.0}, {x_es, -1.0}});
        b.row(RowFamily::kIslDchEnergy, "isl_dch_energy", s, t, kLe, 0.0,
              {{dchi_ac, 1.0}, {dchi_dc, 1.0}, {soc_prev, -1.0}});
      }

      // converter sizing
      if (es) {
        b.row(RowFamily::kInvGrid, "inv_grid", s, t, kGe, 0.0,
              {{x_inv, 1.0}, {dch_ac, -1.0}, {ch_ac, -1.0 / c.eta_inv}});
        b.row(RowFamily::kInvIsl, "inv_isl", s, t, kGe, 0.0, {{x_inv, 1.0}, {dchi_ac, -1.0}});
        b.row(RowFamily::kConGrid, "con_grid", s, t, kGe, 0.0,
              {{x_con, 1.0}, {x_pv, -1.0}, {dch_dc, -1.0}, {ch_dc, -1.0 / c.eta_con}});
        b.row(RowFamily::kConIsl, "con_isl", s, t, kGe, 0.0,
              {{x_con, 1.0}, {x_pv, -1.0}, {dchi_dc, -1.0}});
      } else {
        b.row(RowFamily::kConGrid, "con_grid", s, t, kGe, 0.0, {{x_con, 1.0}, {x_pv, -1.0}});
        b.row(RowFamily::kConIsl, "con_isl", s, t, kGe, 0.0, {{x_con, 1.0}, {x_pv, -1.0}});
      }
      b.row(RowFamily::kIcGridIn, "ic_cap_in", s, t, kGe, 0.0,
            {{x_ic, 1.0}, {f_in, -1.0 / c.eta_ic}});
      b.row(RowFamily::kIcGridOut, "ic_cap_out", s, t, kGe, 0.0, {{x_ic, 1.0}, {f_out, -1.0}});
      b.row(RowFamily::kIcIslIn, "isl_ic_cap_in", s, t, kGe, 0.0,
            {{x_ic, 1.0}, {fi_in, -1.0 / c.eta_ic}});
      b.row(RowFamily::kIcIslOut, "isl_ic_cap_out", s, t, kGe, 0.0,
            {{x_ic, 1.0}, {fi_out, -1.0}});

      // charge/discharge exclusivity through u = x_es * y
      if (es) {
        const auto prod = linearize_product(inst, x_es, y, Mes, {Symbol::kDchAux, s, t},
                                            {Symbol::kDchAuxSlack, s, t},
                                            fmt::format("_s{}_t{}", s, t));
        b.row(RowFamily::kDchLimit, "dch_limit", s, t, kLe, 0.0,
              {{dch_ac, 1.0}, {dch_dc, 1.0}, {prod.u, -1.0}});
        b.row(RowFamily::kChLimit, "ch_limit", s, t, kLe, 0.0,
              {{ch_ac, 1.0}, {ch_dc, 1.0}, {x_es, -1.0}, {prod.u, 1.0}});
        soc_prev = soc;
      }
    }

    if (es) {
      if (options.soc_boundary == SocBoundary::kCyclic) {
        b.row(RowFamily::kSocBoundary, "soc_cycle", s, -1, kEq, 0.0,
              {{soc_init, 1.0}, {soc_prev, -1.0}});
      } else {
        b.row(RowFamily::kSocBoundary, "soc_start", s, -1, kEq, 0.0,
              {{soc_init, 1.0}, {x_es, -options.initial_soc_fraction * c.rho_ep}});
      }
    }
  }

  inst.check();
  const auto dims = model_dimensions(set.size(), set.intervals(), case_spec);
  inst.metadata = {{"scenarios", S},
                   {"intervals", T},
                   {"case", case_spec.index()},
                   {"columns", static_cast<long>(inst.num_columns())},
                   {"rows", static_cast<long>(inst.num_rows())},
                   {"binaries", static_cast<long>(inst.num_integer())},
                   {"expected_columns", dims.columns},
                   {"expected_rows", dims.rows}};
  return inst;
}

namespace {

double value_of(const MilpInstance& inst, const std::vector<double>& x, Symbol sym, int s,
                int t) {
  const auto j = inst.find({sym, s, t});
  return j ? x[*j] : 0.0;
}

Series series_of(const MilpInstance& inst, const std::vector<double>& x, Symbol sym, int s,
                 int T) {
  Series out(T);
  for (int t = 0; t < T; ++t) out[t] = value_of(inst, x, sym, s, t);
  return out;
}

}  // namespace

SizingSolution extract_solution(const MilpInstance& instance, const SolveResult& result,
                                const ScenarioSet& set, const DeviceCatalog& catalog,
                                const TariffPlan& tariff, CaseSpec case_spec,
                                const ModelOptions& options) {
  SizingSolution sol;
  sol.case_spec = case_spec;
  sol.options = options;
  sol.big_m = compute_big_m(set, catalog);
  if (sol.big_m.m_flow <= 0.0) sol.big_m.m_flow = 1.0;
  sol.status = result.status;
  if (result.status == SolveStatus::kInfeasible) return sol;
  if (result.status == SolveStatus::kUnbounded || result.status == SolveStatus::kError) {
    throw SolverError(fmt::format("solver returned {}: {}", to_string(result.status),
                                  result.message));
  }
  if (!result.has_solution()) return sol;
  if (result.values.size() != instance.num_columns()) {
    throw SolverError(fmt::format("solution has {} values for {} columns",
                                  result.values.size(), instance.num_columns()));
  }
  const auto& x = result.values;
  sol.objective = result.objective;
  sol.achieved_gap = result.achieved_gap;
  sol.capacities = {value_of(instance, x, Symbol::kXPv, -1, -1),
                    value_of(instance, x, Symbol::kXEs, -1, -1),
                    value_of(instance, x, Symbol::kXIc, -1, -1),
                    value_of(instance, x, Symbol::kXInv, -1, -1),
                    value_of(instance, x, Symbol::kXCon, -1, -1)};
  const int T = static_cast<int>(set.intervals());
  for (int s = 0; s < static_cast<int>(set.size()); ++s) {
    ScenarioDispatch d;
    d.id = set.days[s].id;
    auto& g = d.grid;
    g.peak = value_of(instance, x, Symbol::kPeak, s, -1);
    g.soc_init = value_of(instance, x, Symbol::kSocInit, s, -1);
    g.p_grid = series_of(instance, x, Symbol::kGrid, s, T);
    g.v_dc = series_of(instance, x, Symbol::kPv, s, T);
    g.f_ac = series_of(instance, x, Symbol::kFlowAc, s, T);
    g.f_dcin = series_of(instance, x, Symbol::kFlowDcIn, s, T);
    g.f_dcout = series_of(instance, x, Symbol::kFlowDcOut, s, T);
    g.z_dc = series_of(instance, x, Symbol::kFlowDir, s, T);
    g.dch_ac = series_of(instance, x, Symbol::kDchAc, s, T);
    g.dch_dc = series_of(instance, x, Symbol::kDchDc, s, T);
    g.ch_ac = series_of(instance, x, Symbol::kChAc, s, T);
    g.ch_dc = series_of(instance, x, Symbol::kChDc, s, T);
    g.soc = series_of(instance, x, Symbol::kSoc, s, T);
    g.y_es = series_of(instance, x, Symbol::kDchState, s, T);
    g.u_es = series_of(instance, x, Symbol::kDchAux, s, T);
    g.kappa_es = series_of(instance, x, Symbol::kDchAuxSlack, s, T);
    auto& i = d.island;
    i.vi_dc = series_of(instance, x, Symbol::kIslPv, s, T);
    i.dchi_ac = series_of(instance, x, Symbol::kIslDchAc, s, T);
    i.dchi_dc = series_of(instance, x, Symbol::kIslDchDc, s, T);
    i.fi_ac = series_of(instance, x, Symbol::kIslFlowAc, s, T);
    i.fi_dcin = series_of(instance, x, Symbol::kIslFlowDcIn, s, T);
    i.fi_dcout = series_of(instance, x, Symbol::kIslFlowDcOut, s, T);
    i.zi_dc = series_of(instance, x, Symbol::kIslFlowDir, s, T);
    i.lcl_ac = series_of(instance, x, Symbol::kShedClAc, s, T);
    i.lcl_dc = series_of(instance, x, Symbol::kShedClDc, s, T);
    i.lnl_ac = series_of(instance, x, Symbol::kShedNlAc, s, T);
    i.lnl_dc = series_of(instance, x, Symbol::kShedNlDc, s, T);
    sol.scenarios.push_back(std::move(d));
  }
  sol.costs = cost_breakdown(sol, set, catalog, tariff);
  return sol;
}

CostBreakdown cost_breakdown(const SizingSolution& solution, const ScenarioSet& set,
                             const DeviceCatalog& catalog, const TariffPlan& tariff) {
  CostBreakdown out;
  out.investment = investment_cost(solution.capacities, catalog);
  const std::size_t S = solution.scenarios.size();
  std::vector<double> energy(S), demand(S), deg(S), cl(S), nl(S);
  for (std::size_t s = 0; s < S; ++s) {
    const auto& g = solution.scenarios[s].grid;
    const auto& i = solution.scenarios[s].island;
    energy[s] = energy_charge(g.p_grid, tariff);
    // Solver noise can leave the peak a hair outside [0, cap].
    demand[s] = tariff.demand_price * std::clamp(g.peak, 0.0, tariff.peak_cap);
    deg[s] = degradation_cost(g.dch_ac, g.dch_dc, g.ch_ac, g.ch_dc, catalog);
    const auto shed = shedding_cost(i.lcl_ac, i.lcl_dc, i.lnl_ac, i.lnl_dc, catalog);
    cl[s] = shed.critical;
    nl[s] = shed.noncritical;
  }
  out.energy_charges = annualize_expected(set, energy, CostKind::kEnergy);
  out.demand_charges = annualize_expected(set, demand, CostKind::kDemand);
  out.degradation = annualize_expected(set, deg, CostKind::kDegradation);
  out.shed_critical = annualize_expected(set, cl, CostKind::kShedding);
  out.shed_noncritical = annualize_expected(set, nl, CostKind::kShedding);
  out.total = out.sum_of_components();
  return out;
}

}  // namespace dersizer
