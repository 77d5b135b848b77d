#include "dersizer/data_model.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dersizer/errors.hpp"

namespace dersizer {
namespace {

// Howard Hinnant's civil-calendar conversions.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& value) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    value = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(value);
  } catch (const std::exception&) {
    return false;
  }
}

int parse_digits(const std::string& ts, std::size_t pos, std::size_t len) {
  if (pos + len > ts.size()) throw IngestError("malformed timestamp '" + ts + "'");
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (ts[i] < '0' || ts[i] > '9') throw IngestError("malformed timestamp '" + ts + "'");
    v = v * 10 + (ts[i] - '0');
  }
  return v;
}

}  // namespace

TariffPlan TariffPlan::default_tou() {
  TariffPlan plan;
  plan.energy_price.resize(kHoursPerDay);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    if (h >= 12 && h < 18) {
      plan.energy_price[h] = 0.16;
    } else if ((h >= 8 && h < 12) || (h >= 18 && h < 22)) {
      plan.energy_price[h] = 0.12;
    } else {
      plan.energy_price[h] = 0.09;
    }
  }
  return plan;
}

void ValidationReport::merge(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    out += v;
    out += '\n';
  }
  return out;
}

std::int64_t parse_iso_hour(const std::string& raw) {
  std::string ts = raw;
  if (!ts.empty() && (ts.back() == 'Z' || ts.back() == 'z')) ts.pop_back();
  // YYYY-MM-DDTHH[:MM[:SS]]
  if (ts.size() < 13 || ts[4] != '-' || ts[7] != '-' || (ts[10] != 'T' && ts[10] != ' ')) {
    throw IngestError("malformed timestamp '" + raw + "'");
  }
  const int year = parse_digits(ts, 0, 4);
  const int month = parse_digits(ts, 5, 2);
  const int day = parse_digits(ts, 8, 2);
  const int hour = parse_digits(ts, 11, 2);
  int minute = 0;
  int second = 0;
  if (ts.size() > 13) {
    if (ts[13] != ':') throw IngestError("malformed timestamp '" + raw + "'");
    minute = parse_digits(ts, 14, 2);
    if (ts.size() > 16) {
      if (ts[16] != ':' || ts.size() != 19) throw IngestError("malformed timestamp '" + raw + "'");
      second = parse_digits(ts, 17, 2);
    }
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23) {
    throw IngestError("timestamp out of range '" + raw + "'");
  }
  if (minute != 0 || second != 0) {
    throw IngestError("timestamp '" + raw + "' is not on an hour boundary");
  }
  return days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) * 24 +
         hour;
}

std::string format_iso_hour(std::int64_t epoch_hour) {
  std::int64_t days = epoch_hour >= 0 ? epoch_hour / 24 : -((-epoch_hour + 23) / 24);
  const std::int64_t hour = epoch_hour - days * 24;
  std::int64_t y = 0;
  unsigned m = 0;
  unsigned d = 0;
  civil_from_days(days, y, m, d);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:00:00", y, m, d, hour);
}

AnnualProfile parse_profile_csv(const std::filesystem::path& path, const ProfileSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open profile '" + path.string() + "'");
  return parse_profile_csv(in, path.string(), schema);
}

AnnualProfile parse_profile_csv(std::istream& in, const std::string& source_name,
                                const ProfileSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError(source_name + ": empty profile");
  const auto header = split_csv_line(trim(line));
  if (header.size() != 3 || header[0] != schema.timestamp || header[1] != schema.load ||
      header[2] != schema.pv) {
    throw IngestError(fmt::format("{}: header must be '{},{},{}', got '{}'", source_name,
                                  schema.timestamp, schema.load, schema.pv, trim(line)));
  }

  AnnualProfile profile;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw IngestError(fmt::format("{}: row {} has {} fields, expected 3", source_name, row,
                                    fields.size()));
    }
    std::int64_t hour = 0;
    try {
      hour = parse_iso_hour(fields[0]);
    } catch (const IngestError& e) {
      throw IngestError(fmt::format("{}: row {}: {}", source_name, row, e.what()));
    }
    if (!profile.epoch_hours.empty()) {
      const std::int64_t prev = profile.epoch_hours.back();
      if (hour == prev) {
        throw IngestError(
            fmt::format("{}: row {}: duplicate timestamp {}", source_name, row, fields[0]));
      }
      if (hour < prev) {
        throw IngestError(fmt::format("{}: row {}: timestamp {} is earlier than previous row",
                                      source_name, row, fields[0]));
      }
      if (hour != prev + 1) {
        throw IngestError(fmt::format("{}: row {}: missing hour {} (gap before {})",
                                      source_name, row, format_iso_hour(prev + 1), fields[0]));
      }
    }
    double load = 0.0;
    double pv = 0.0;
    if (!parse_number(fields[1], load) || !parse_number(fields[2], pv)) {
      throw IngestError(fmt::format("{}: row {}: non-numeric value", source_name, row));
    }
    if (load < 0.0) {
      throw ValidationError(
          fmt::format("{}: row {} ({}): negative load {}", source_name, row, fields[0], load));
    }
    if (pv < 0.0 || pv > 1.0) {
      throw ValidationError(fmt::format("{}: row {} ({}): PV availability {} outside [0,1]",
                                        source_name, row, fields[0], pv));
    }
    profile.timestamps.push_back(fields[0]);
    profile.epoch_hours.push_back(hour);
    profile.load_kw.push_back(load);
    profile.pv_pu.push_back(pv);
  }
  if (profile.size() == 0) throw IngestError(source_name + ": no data rows");
  return profile;
}

void write_profile_csv(const std::filesystem::path& path, const AnnualProfile& profile) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_profile_csv(out, profile);
}

void write_profile_csv(std::ostream& out, const AnnualProfile& profile) {
  out << "timestamp,load_kw,pv_pu\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const std::string ts = i < profile.timestamps.size()
                               ? profile.timestamps[i]
                               : format_iso_hour(profile.epoch_hours.at(i));
    out << fmt::format("{},{},{}\n", ts, profile.load_kw[i], profile.pv_pu[i]);
  }
}

LoadClasses split_loads(const Series& total_load, const LoadSplitSpec& spec) {
  require_valid(validate_split(spec), "load split");
  LoadClasses out;
  const std::size_t n = total_load.size();
  out.cl_ac.resize(n);
  out.cl_dc.resize(n);
  out.nl_ac.resize(n);
  out.nl_dc.resize(n);
  // Each remainder is computed by subtraction so the four classes add back
  // to the input up to one rounding of the final sum.
  for (std::size_t t = 0; t < n; ++t) {
    const double total = total_load[t];
    const double critical = total * spec.critical_fraction;
    const double noncritical = total - critical;
    out.cl_dc[t] = critical * spec.dc_fraction_of_critical;
    out.cl_ac[t] = critical - out.cl_dc[t];
    out.nl_dc[t] = noncritical * spec.dc_fraction_of_noncritical;
    out.nl_ac[t] = noncritical - out.nl_dc[t];
  }
  return out;
}

ValidationReport validate_scenario_set(const ScenarioSet& set) {
  ValidationReport report;
  if (set.days.empty()) {
    report.add("scenario set is empty");
    return report;
  }
  const std::size_t T = set.days.front().intervals();
  if (T == 0) report.add(fmt::format("day '{}' has no intervals", set.days.front().id));
  double prob_sum = 0.0;
  for (const auto& day : set.days) {
    prob_sum += day.probability;
    if (!(day.probability > 0.0 && day.probability <= 1.0)) {
      report.add(fmt::format("day '{}': probability {} outside (0, 1]", day.id, day.probability));
    }
    const std::pair<const char*, const Series*> series[] = {
        {"cl_ac", &day.cl_ac}, {"cl_dc", &day.cl_dc},          {"nl_ac", &day.nl_ac},
        {"nl_dc", &day.nl_dc}, {"pv_availability", &day.pv_availability}};
    for (const auto& [name, s] : series) {
      if (s->size() != T) {
        report.add(fmt::format("day '{}': {} has length {}, expected {}", day.id, name, s->size(),
                               T));
        continue;
      }
      for (std::size_t t = 0; t < T; ++t) {
        const double v = (*s)[t];
        if (!std::isfinite(v)) {
          report.add(fmt::format("day '{}' interval {}: {} is not finite", day.id, t, name));
        } else if (s == &day.pv_availability) {
          if (v < 0.0 || v > 1.0) {
            report.add(fmt::format("day '{}' interval {}: PV availability {} outside [0,1]",
                                   day.id, t, v));
          }
        } else if (v < 0.0) {
          report.add(fmt::format("day '{}' interval {}: {} is negative ({})", day.id, t, name, v));
        }
      }
    }
  }
  if (std::abs(prob_sum - 1.0) > 1e-9) {
    report.add(fmt::format("probabilities sum to {:.12g}", prob_sum));
  }
  if (!(set.annual_day_weight > 0.0)) report.add("annual_day_weight must be positive");
  if (!(set.annual_demand_weight > 0.0)) report.add("annual_demand_weight must be positive");
  return report;
}

ValidationReport validate_catalog(const DeviceCatalog& c) {
  ValidationReport report;
  const std::pair<const char*, double> nonneg[] = {
      {"c_pv", c.c_pv},       {"c_es", c.c_es},       {"c_ic", c.c_ic},
      {"c_inv", c.c_inv},     {"c_con", c.c_con},     {"c_deg", c.c_deg},
      {"voll_cl", c.voll_cl}, {"voll_nl", c.voll_nl}, {"pv_max", c.pv_max},
      {"es_max", c.es_max}};
  for (const auto& [name, v] : nonneg) {
    if (!(v >= 0.0) || !std::isfinite(v)) report.add(fmt::format("{} must be >= 0 (got {})", name, v));
  }
  const std::pair<const char*, double> etas[] = {{"eta_ic", c.eta_ic},
                                                 {"eta_inv", c.eta_inv},
                                                 {"eta_con", c.eta_con},
                                                 {"eta_ch", c.eta_ch},
                                                 {"eta_dch", c.eta_dch}};
  for (const auto& [name, v] : etas) {
    if (!(v > 0.0 && v <= 1.0)) report.add(fmt::format("{} must be in (0, 1] (got {})", name, v));
  }
  if (!(c.alpha_min >= 0.0 && c.alpha_min < c.alpha_max && c.alpha_max <= 1.0)) {
    report.add(fmt::format("SoC band requires 0 <= alpha_min < alpha_max <= 1 (got {}, {})",
                           c.alpha_min, c.alpha_max));
  }
  if (!(c.rho_ep > 0.0) || !std::isfinite(c.rho_ep)) {
    report.add(fmt::format("rho_ep must be > 0 (got {})", c.rho_ep));
  }
  return report;
}

ValidationReport validate_tariff(const TariffPlan& tariff, std::size_t intervals) {
  ValidationReport report;
  if (tariff.energy_price.size() != intervals) {
    report.add(fmt::format("energy_price has length {}, expected {}", tariff.energy_price.size(),
                           intervals));
  }
  for (std::size_t t = 0; t < tariff.energy_price.size(); ++t) {
    if (!(tariff.energy_price[t] >= 0.0) || !std::isfinite(tariff.energy_price[t])) {
      report.add(fmt::format("energy_price[{}] must be >= 0", t));
    }
  }
  if (!(tariff.demand_price >= 0.0) || !std::isfinite(tariff.demand_price)) {
    report.add("demand_price must be >= 0");
  }
  if (!(tariff.peak_cap > 0.0) || !std::isfinite(tariff.peak_cap)) {
    report.add("peak_cap must be > 0");
  }
  return report;
}

ValidationReport validate_split(const LoadSplitSpec& spec) {
  ValidationReport report;
  const std::pair<const char*, double> fr[] = {
      {"critical_fraction", spec.critical_fraction},
      {"dc_fraction_of_critical", spec.dc_fraction_of_critical},
      {"dc_fraction_of_noncritical", spec.dc_fraction_of_noncritical}};
  for (const auto& [name, v] : fr) {
    if (!(v >= 0.0 && v <= 1.0)) report.add(fmt::format("{} must be in [0, 1] (got {})", name, v));
  }
  return report;
}

void require_valid(const ValidationReport& report, const std::string& what) {
  if (!report.ok()) throw ValidationError(what + " is invalid:\n" + report.to_string());
}

}  // namespace dersizer
