#pragma once

// Domain types consumed by the sizing model, plus profile ingestion and
// invariant checking. Interval length is fixed at one hour throughout the
// library, so a kW value per interval is also a kWh value per interval.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dersizer {

using Series = std::vector<double>;

inline constexpr std::size_t kHoursPerDay = 24;

/// One weighted representative day. Load series are kW, PV availability is p.u.
struct DayScenario {
  std::string id;
  double probability = 1.0;
  /// Calendar day index in the source profile, when the day came from one.
  std::optional<std::size_t> source_day;
  Series cl_ac, cl_dc, nl_ac, nl_dc;
  Series pv_availability;

  std::size_t intervals() const { return pv_availability.size(); }
  double total_load(std::size_t t) const {
    return cl_ac[t] + cl_dc[t] + nl_ac[t] + nl_dc[t];
  }
};

struct ScenarioSet {
  std::vector<DayScenario> days;
  /// Days per year represented by unit probability (energy-like terms).
  double annual_day_weight = 365.0;
  /// Demand-charge billing periods per year per unit probability.
  double annual_demand_weight = 12.0;

  std::size_t intervals() const { return days.empty() ? 0 : days.front().intervals(); }
  std::size_t size() const { return days.size(); }
};

/// Investment and technical parameters. Defaults are the published
/// annualized prices, caps and efficiencies; SoC band and degradation price
/// are placeholders that real studies override.
struct DeviceCatalog {
  double c_pv = 108.0;   // $/kW-yr
  double c_es = 424.0;
  double c_ic = 8.1;
  double c_inv = 6.5;
  double c_con = 4.3;
  double c_deg = 0.005;  // $/kWh throughput
  double voll_cl = 3000.0;
  double voll_nl = 500.0;
  double eta_ic = 0.96;
  double eta_inv = 0.96;
  double eta_con = 0.98;
  double eta_ch = 0.93;
  double eta_dch = 0.93;
  double pv_max = 400.0;  // kW
  double es_max = 350.0;  // kW
  double rho_ep = 2.0;    // h
  double alpha_min = 0.1;
  double alpha_max = 0.9;
};

struct TariffPlan {
  Series energy_price;        // $/kWh per interval
  double demand_price = 18.0;  // $/kW per billing period
  double peak_cap = 1000.0;    // kW

  /// Three-period weekday TOU schedule: off-peak 0-7h and 22-23h at $0.09,
  /// part-peak 8-11h and 18-21h at $0.12, peak 12-17h at $0.16.
  static TariffPlan default_tou();
};

struct LoadSplitSpec {
  double critical_fraction = 0.3;
  double dc_fraction_of_critical = 0.5;
  double dc_fraction_of_noncritical = 0.5;
};

struct LoadClasses {
  Series cl_ac, cl_dc, nl_ac, nl_dc;
};

/// Hourly annual profile as read from disk.
struct AnnualProfile {
  std::vector<std::string> timestamps;
  std::vector<std::int64_t> epoch_hours;
  Series load_kw;
  Series pv_pu;

  std::size_t size() const { return load_kw.size(); }
  std::size_t whole_days() const { return size() / kHoursPerDay; }
};

struct ProfileSchema {
  std::string timestamp = "timestamp";
  std::string load = "load_kw";
  std::string pv = "pv_pu";
};

/// Human-readable list of invariant violations; empty means valid.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string msg) { violations.push_back(std::move(msg)); }
  void merge(const ValidationReport& other);
  std::string to_string() const;
};

/// Parses "YYYY-MM-DDTHH[:MM[:SS]]" with an optional trailing "Z" into hours
/// since 1970-01-01T00. Minutes and seconds must be zero.
std::int64_t parse_iso_hour(const std::string& ts);
std::string format_iso_hour(std::int64_t epoch_hour);

AnnualProfile parse_profile_csv(const std::filesystem::path& path,
                                const ProfileSchema& schema = {});
AnnualProfile parse_profile_csv(std::istream& in, const std::string& source_name,
                                const ProfileSchema& schema = {});
void write_profile_csv(const std::filesystem::path& path, const AnnualProfile& profile);
void write_profile_csv(std::ostream& out, const AnnualProfile& profile);

LoadClasses split_loads(const Series& total_load, const LoadSplitSpec& spec);

ValidationReport validate_scenario_set(const ScenarioSet& set);
ValidationReport validate_catalog(const DeviceCatalog& catalog);
ValidationReport validate_tariff(const TariffPlan& tariff, std::size_t intervals);
ValidationReport validate_split(const LoadSplitSpec& spec);

/// Throws ValidationError carrying the report text when it is not ok.
void require_valid(const ValidationReport& report, const std::string& what);

}  // namespace dersizer
