#pragma once

// Standard-form sparse MILP container. The builder fills it, the solvers read
// it, and the symbol map ties every column back to a model quantity.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dersizer {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Decision-variable symbols of the sizing model.
enum class Symbol : std::uint8_t {
  // installed capacities
  kXPv,
  kXEs,
  kXIc,
  kXInv,
  kXCon,
  // per scenario
  kPeak,
  kSocInit,
  // grid-connected, per (s, t)
  kGrid,
  kPv,
  kFlowAc,
  kFlowDcIn,
  kFlowDcOut,
  kFlowDir,
  kDchAc,
  kDchDc,
  kChAc,
  kChDc,
  kSoc,
  kDchState,
  kDchAux,
  kDchAuxSlack,
  // islanded, per (s, t)
  kIslPv,
  kIslDchAc,
  kIslDchDc,
  kIslFlowAc,
  kIslFlowDcIn,
  kIslFlowDcOut,
  kIslFlowDir,
  kShedClAc,
  kShedClDc,
  kShedNlAc,
  kShedNlDc,
};

inline constexpr int kSymbolCount = static_cast<int>(Symbol::kShedNlDc) + 1;

/// Base name used in column names and LP files ("p_grid", "x_es", ...).
const char* symbol_name(Symbol sym);

struct SymbolKey {
  Symbol symbol{};
  int scenario = -1;  // -1 when not indexed by scenario
  int interval = -1;  // -1 when not indexed by interval

  friend bool operator==(const SymbolKey&, const SymbolKey&) = default;
};

struct SymbolKeyHash {
  std::size_t operator()(const SymbolKey& k) const noexcept {
    return (static_cast<std::size_t>(k.symbol) << 40) ^
           (static_cast<std::size_t>(static_cast<std::uint32_t>(k.scenario)) << 20) ^
           static_cast<std::size_t>(static_cast<std::uint32_t>(k.interval));
  }
};

enum class RowSense : std::uint8_t { kLe, kEq, kGe };

struct Column {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool integer = false;
  double cost = 0.0;
  std::optional<SymbolKey> key;
};

struct Row {
  std::string name;
  std::vector<int> index;
  std::vector<double> value;
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
  /// Model equation family this row implements (0 when untagged).
  int family = 0;
};

/// Minimization MILP: min c'x s.t. rows, bounds, integrality.
class MilpInstance {
 public:
  int add_column(Column col);
  int add_row(Row row);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::vector<Column>& mutable_columns() { return columns_; }
  std::vector<Row>& mutable_rows() { return rows_; }

  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_integer() const;

  /// Column holding `key`, if the model has one.
  std::optional<int> find(const SymbolKey& key) const;
  int at(const SymbolKey& key) const;

  /// Structural checks: binaries in [0,1], row indices in range, finite
  /// coefficients, unique symbol keys. Throws BuildError on violation.
  void check() const;

  double objective_value(const std::vector<double>& x) const;
  /// Largest row or bound violation of `x`, scaled by max(1, |rhs|).
  double max_violation(const std::vector<double>& x) const;

  /// Free-form integers describing the instance (dimensions, flags).
  std::vector<std::pair<std::string, long>> metadata;

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
  std::unordered_map<SymbolKey, int, SymbolKeyHash> symbols_;
};

/// Writes the instance in CPLEX LP text format. Column names are preserved.
void write_lp(std::ostream& out, const MilpInstance& instance);

}  // namespace dersizer
