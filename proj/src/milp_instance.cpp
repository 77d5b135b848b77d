#include "dersizer/milp_instance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dersizer/errors.hpp"

namespace dersizer {

const char* symbol_name(Symbol sym) {
  switch (sym) {
    case Symbol::kXPv: return "x_pv";
    case Symbol::kXEs: return "x_es";
    case Symbol::kXIc: return "x_ic";
    case Symbol::kXInv: return "x_inv";
    case Symbol::kXCon: return "x_con";
    case Symbol::kPeak: return "p_peak";
    case Symbol::kSocInit: return "soc_init";
    case Symbol::kGrid: return "p_grid";
    case Symbol::kPv: return "v_dc";
    case Symbol::kFlowAc: return "f_ac";
    case Symbol::kFlowDcIn: return "f_dcin";
    case Symbol::kFlowDcOut: return "f_dcout";
    case Symbol::kFlowDir: return "z_dc";
    case Symbol::kDchAc: return "dch_ac";
    case Symbol::kDchDc: return "dch_dc";
    case Symbol::kChAc: return "ch_ac";
    case Symbol::kChDc: return "ch_dc";
    case Symbol::kSoc: return "soc";
    case Symbol::kDchState: return "y_es";
    case Symbol::kDchAux: return "u_es";
    case Symbol::kDchAuxSlack: return "kappa_es";
    case Symbol::kIslPv: return "vi_dc";
    case Symbol::kIslDchAc: return "dchi_ac";
    case Symbol::kIslDchDc: return "dchi_dc";
    case Symbol::kIslFlowAc: return "fi_ac";
    case Symbol::kIslFlowDcIn: return "fi_dcin";
    case Symbol::kIslFlowDcOut: return "fi_dcout";
    case Symbol::kIslFlowDir: return "zi_dc";
    case Symbol::kShedClAc: return "lcl_ac";
    case Symbol::kShedClDc: return "lcl_dc";
    case Symbol::kShedNlAc: return "lnl_ac";
    case Symbol::kShedNlDc: return "lnl_dc";
  }
  return "?";
}

int MilpInstance::add_column(Column col) {
  const int idx = static_cast<int>(columns_.size());
  if (col.key) {
    auto [it, inserted] = symbols_.emplace(*col.key, idx);
    if (!inserted) throw BuildError("duplicate symbol for column '" + col.name + "'");
  }
  columns_.push_back(std::move(col));
  return idx;
}

int MilpInstance::add_row(Row row) {
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

std::size_t MilpInstance::num_integer() const {
  return static_cast<std::size_t>(
      std::count_if(columns_.begin(), columns_.end(), [](const Column& c) { return c.integer; }));
}

std::optional<int> MilpInstance::find(const SymbolKey& key) const {
  auto it = symbols_.find(key);
  if (it == symbols_.end()) return std::nullopt;
  return it->second;
}

int MilpInstance::at(const SymbolKey& key) const {
  auto idx = find(key);
  if (!idx) {
    throw BuildError(fmt::format("no column for {}[s{},t{}]", symbol_name(key.symbol),
                                 key.scenario, key.interval));
  }
  return *idx;
}

void MilpInstance::check() const {
  const int n = static_cast<int>(columns_.size());
  for (const auto& c : columns_) {
    if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper) {
      throw BuildError(fmt::format("column '{}' has bounds [{}, {}]", c.name, c.lower, c.upper));
    }
    if (!std::isfinite(c.cost)) throw BuildError("column '" + c.name + "' has non-finite cost");
    if (c.integer && (c.lower < 0.0 || c.upper > 1.0)) {
      throw BuildError("integer column '" + c.name + "' is not binary");
    }
  }
  for (const auto& r : rows_) {
    if (r.index.size() != r.value.size()) throw BuildError("row '" + r.name + "' is ragged");
    if (!std::isfinite(r.rhs)) throw BuildError("row '" + r.name + "' has non-finite rhs");
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      if (r.index[k] < 0 || r.index[k] >= n) {
        throw BuildError(fmt::format("row '{}' references column {}", r.name, r.index[k]));
      }
      if (!std::isfinite(r.value[k])) {
        throw BuildError("row '" + r.name + "' has a non-finite coefficient");
      }
    }
  }
}

double MilpInstance::objective_value(const std::vector<double>& x) const {
  double obj = 0.0;
  for (std::size_t j = 0; j < columns_.size(); ++j) obj += columns_[j].cost * x.at(j);
  return obj;
}

double MilpInstance::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& c = columns_[j];
    if (x[j] < c.lower) worst = std::max(worst, (c.lower - x[j]) / std::max(1.0, std::abs(c.lower)));
    if (x[j] > c.upper) worst = std::max(worst, (x[j] - c.upper) / std::max(1.0, std::abs(c.upper)));
  }
  for (const auto& r : rows_) {
    double act = 0.0;
    for (std::size_t k = 0; k < r.index.size(); ++k) act += r.value[k] * x[r.index[k]];
    const double scale = std::max(1.0, std::abs(r.rhs));
    double v = 0.0;
    switch (r.sense) {
      case RowSense::kLe: v = act - r.rhs; break;
      case RowSense::kGe: v = r.rhs - act; break;
      case RowSense::kEq: v = std::abs(act - r.rhs); break;
    }
    worst = std::max(worst, v / scale);
  }
  return worst;
}

namespace {

std::string lp_number(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  return fmt::format("{:.17g}", v);
}

void write_terms(std::ostream& out, const std::vector<Column>& cols,
                 const std::vector<std::pair<int, double>>& terms) {
  int on_line = 0;
  for (const auto& [j, a] : terms) {
    out << (a < 0 ? " - " : " + ") << fmt::format("{:.17g}", std::abs(a)) << ' ' << cols[j].name;
    if (++on_line == 6) {
      out << "\n   ";
      on_line = 0;
    }
  }
}

}  // namespace

void write_lp(std::ostream& out, const MilpInstance& instance) {
  const auto& cols = instance.columns();
  out << "\\ DER sizing model: " << cols.size() << " columns, " << instance.num_rows()
      << " rows\n";
  out << "Minimize\n obj:";
  std::vector<std::pair<int, double>> terms;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].cost != 0.0) terms.emplace_back(static_cast<int>(j), cols[j].cost);
  }
  if (terms.empty() && !cols.empty()) terms.emplace_back(0, 0.0);
  write_terms(out, cols, terms);
  out << "\nSubject To\n";
  for (const auto& r : instance.rows()) {
    terms.clear();
    for (std::size_t k = 0; k < r.index.size(); ++k) {
      if (r.value[k] != 0.0) terms.emplace_back(r.index[k], r.value[k]);
    }
    if (terms.empty()) terms.emplace_back(0, 0.0);
    out << ' ' << r.name << ':';
    write_terms(out, cols, terms);
    const char* sense = r.sense == RowSense::kLe ? " <= " : r.sense == RowSense::kGe ? " >= " : " = ";
    out << sense << lp_number(r.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& c : cols) {
    if (c.lower == -kInf && c.upper == kInf) {
      out << ' ' << c.name << " free\n";
    } else {
      out << ' ' << lp_number(c.lower) << " <= " << c.name << " <= " << lp_number(c.upper) << '\n';
    }
  }
  bool any_int = false;
  for (const auto& c : cols) {
    if (!c.integer) continue;
    if (!any_int) out << "Generals\n";
    any_int = true;
    out << ' ' << c.name << '\n';
  }
  out << "End\n";
}

}  // namespace dersizer
