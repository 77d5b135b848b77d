#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dersizer/data_model.hpp"
#include "dersizer/errors.hpp"

namespace {

using namespace dersizer;

std::string hourly_csv(int hours, int skip = -1, int dup = -1) {
  std::ostringstream os;
  os << "timestamp,load_kw,pv_pu\n";
  const std::int64_t start = parse_iso_hour("2021-01-01T00:00:00");
  for (int h = 0; h < hours; ++h) {
    if (h == skip) continue;
    os << format_iso_hour(start + h) << ',' << 100 + h % 24 << ',' << (h % 24) / 24.0 << '\n';
    if (h == dup) os << format_iso_hour(start + h) << ",1,0\n";
  }
  return os.str();
}

TEST(ProfileCsv, ParsesFullYear) {
  std::istringstream in(hourly_csv(8760));
  const auto p = parse_profile_csv(in, "year.csv");
  EXPECT_EQ(p.size(), 8760u);
  EXPECT_EQ(p.whole_days(), 365u);
  EXPECT_EQ(p.timestamps.front(), "2021-01-01T00:00:00");
  EXPECT_DOUBLE_EQ(p.load_kw[25], 101.0);
}

TEST(ProfileCsv, MissingHourNamesTheGap) {
  std::istringstream in(hourly_csv(48, 30));
  try {
    parse_profile_csv(in, "gap.csv");
    FAIL() << "expected an ingestion error";
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find("2021-01-02T06:00"), std::string::npos) << e.what();
  }
}

TEST(ProfileCsv, DuplicateTimestampNamesTheRow) {
  std::istringstream in(hourly_csv(48, -1, 5));
  try {
    parse_profile_csv(in, "dup.csv");
    FAIL() << "expected an ingestion error";
  } catch (const IngestError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos) << e.what();
  }
}

TEST(ProfileCsv, RejectsWrongHeader) {
  std::istringstream in("time,load,pv\n2021-01-01T00:00,1,0\n");
  EXPECT_THROW(parse_profile_csv(in, "bad.csv"), IngestError);
}

TEST(ProfileCsv, RejectsNegativeLoadAndBadAvailability) {
  std::istringstream neg("timestamp,load_kw,pv_pu\n2021-01-01T00:00,-1,0\n");
  EXPECT_THROW(parse_profile_csv(neg, "neg.csv"), ValidationError);
  std::istringstream pv("timestamp,load_kw,pv_pu\n2021-01-01T00:00,1,1.2\n");
  EXPECT_THROW(parse_profile_csv(pv, "pv.csv"), ValidationError);
}

TEST(ProfileCsv, RoundTripPreservesValues) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> load(0.0, 900.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AnnualProfile p;
  const std::int64_t start = parse_iso_hour("2021-03-14T00");
  for (int h = 0; h < 24 * 30; ++h) {
    p.epoch_hours.push_back(start + h);
    p.timestamps.push_back(format_iso_hour(start + h));
    p.load_kw.push_back(load(rng));
    p.pv_pu.push_back(unit(rng));
  }
  std::stringstream buf;
  write_profile_csv(buf, p);
  const auto q = parse_profile_csv(buf, "roundtrip");
  ASSERT_EQ(q.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(q.load_kw[i], p.load_kw[i], 1e-9 * std::max(1.0, p.load_kw[i]));
    EXPECT_NEAR(q.pv_pu[i], p.pv_pu[i], 1e-9);
    EXPECT_EQ(q.epoch_hours[i], p.epoch_hours[i]);
  }
}

TEST(IsoHour, RoundTripsAcrossLeapDay) {
  const auto h = parse_iso_hour("2020-02-29T23:00:00Z");
  EXPECT_EQ(format_iso_hour(h + 1), "2020-03-01T00:00:00");
  EXPECT_EQ(parse_iso_hour("1970-01-01T00"), 0);
  EXPECT_THROW(parse_iso_hour("2021-01-01T00:30"), IngestError);
}

TEST(SplitLoads, NoCriticalShare) {
  LoadSplitSpec spec{0.0, 0.5, 0.5};
  const auto c = split_loads({100.0}, spec);
  EXPECT_DOUBLE_EQ(c.cl_ac[0] + c.cl_dc[0], 0.0);
  EXPECT_DOUBLE_EQ(c.nl_ac[0] + c.nl_dc[0], 100.0);
}

TEST(SplitLoads, EvenSplitGivesQuarters) {
  const auto c = split_loads({100.0}, {0.5, 0.5, 0.5});
  EXPECT_DOUBLE_EQ(c.cl_ac[0], 25.0);
  EXPECT_DOUBLE_EQ(c.cl_dc[0], 25.0);
  EXPECT_DOUBLE_EQ(c.nl_ac[0], 25.0);
  EXPECT_DOUBLE_EQ(c.nl_dc[0], 25.0);
}

TEST(SplitLoads, ZeroLoad) {
  const auto c = split_loads({0.0, 0.0}, {});
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(c.cl_ac[t] + c.cl_dc[t] + c.nl_ac[t] + c.nl_dc[t], 0.0);
  }
}

TEST(SplitLoads, ConservativeForRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const LoadSplitSpec spec{unit(rng), unit(rng), unit(rng)};
    Series total(24);
    for (double& v : total) v = 1000.0 * unit(rng);
    const auto c = split_loads(total, spec);
    for (std::size_t t = 0; t < total.size(); ++t) {
      EXPECT_NEAR(c.cl_ac[t] + c.cl_dc[t] + c.nl_ac[t] + c.nl_dc[t], total[t], 4e-16 * total[t]);
      EXPECT_GE(c.cl_ac[t], 0.0);
      EXPECT_GE(c.cl_dc[t], 0.0);
      EXPECT_GE(c.nl_ac[t], 0.0);
      EXPECT_GE(c.nl_dc[t], 0.0);
    }
  }
}

DayScenario flat_day(const std::string& id, double p) {
  DayScenario d;
  d.id = id;
  d.probability = p;
  d.cl_ac = d.cl_dc = d.nl_ac = d.nl_dc = Series(24, 10.0);
  d.pv_availability = Series(24, 0.5);
  return d;
}

TEST(ValidateScenarioSet, AcceptsProperWeights) {
  ScenarioSet set;
  set.days = {flat_day("a", 0.5), flat_day("b", 0.5)};
  EXPECT_TRUE(validate_scenario_set(set).ok());
}

TEST(ValidateScenarioSet, ReportsProbabilitySum) {
  ScenarioSet set;
  set.days = {flat_day("a", 0.5), flat_day("b", 0.6)};
  const auto r = validate_scenario_set(set);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.to_string().find("probabilities sum to 1.1"), std::string::npos) << r.to_string();
}

TEST(ValidateScenarioSet, ReportsAvailabilityAboveOne) {
  ScenarioSet set;
  set.days = {flat_day("monday", 1.0)};
  set.days[0].pv_availability[7] = 1.2;
  const auto r = validate_scenario_set(set);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.to_string().find("monday"), std::string::npos) << r.to_string();
  EXPECT_NE(r.to_string().find("7"), std::string::npos) << r.to_string();
}

TEST(ValidateScenarioSet, ReportsLengthMismatch) {
  ScenarioSet set;
  set.days = {flat_day("a", 0.5), flat_day("b", 0.5)};
  set.days[1].nl_dc.pop_back();
  EXPECT_FALSE(validate_scenario_set(set).ok());
}

TEST(ValidateCatalog, DefaultsAreValidAndBadEfficiencyIsNot) {
  EXPECT_TRUE(validate_catalog({}).ok());
  DeviceCatalog c;
  c.eta_ic = 0.0;
  EXPECT_FALSE(validate_catalog(c).ok());
  c = {};
  c.alpha_min = 0.95;
  EXPECT_FALSE(validate_catalog(c).ok());
}

TEST(ValidateTariff, DefaultTouCoversADay) {
  const auto t = TariffPlan::default_tou();
  ASSERT_EQ(t.energy_price.size(), 24u);
  EXPECT_DOUBLE_EQ(t.energy_price[3], 0.09);
  EXPECT_DOUBLE_EQ(t.energy_price[9], 0.12);
  EXPECT_DOUBLE_EQ(t.energy_price[14], 0.16);
  EXPECT_DOUBLE_EQ(t.energy_price[23], 0.09);
  EXPECT_TRUE(validate_tariff(t, 24).ok());
  EXPECT_FALSE(validate_tariff(t, 12).ok());
}

TEST(ValidateSplit, RejectsFractionAboveOne) {
  EXPECT_FALSE(validate_split({1.5, 0.5, 0.5}).ok());
  EXPECT_THROW(require_valid(validate_split({1.5, 0.5, 0.5}), "split"), ValidationError);
}

}  // namespace
