#include "dersizer/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dersizer {
namespace {

// Portable uniform [0, 1) from the raw engine output; the standard
// distributions are implementation-defined.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

// `per_unit` steps per unit; dividing an integer by it rounds exactly.
double round_to(double v, double per_unit) { return std::round(v * per_unit) / per_unit; }

}  // namespace

AnnualProfile synthetic_building_year(const SyntheticSpec& spec) {
  constexpr double pi = std::numbers::pi;
  const int days = is_leap(spec.year) ? 366 : 365;
  const std::int64_t first = parse_iso_hour(std::to_string(spec.year) + "-01-01T00");
  // 1970-01-01 was a Thursday; weekday 0 = Monday
  const int first_weekday = static_cast<int>(((first / 24) % 7 + 3) % 7);
  Uniform u(spec.seed);
  const double phi = spec.latitude_deg * pi / 180.0;

  AnnualProfile p;
  Series raw;
  raw.reserve(static_cast<std::size_t>(days) * kHoursPerDay);
  for (int d = 0; d < days; ++d) {
    const int weekday = (first_weekday + d) % 7;
    const bool workday = weekday < 5;
    const double summer = 0.5 * (1.0 - std::cos(2.0 * pi * (d - 15) / days));
    const double day_scale = 0.9 + 0.2 * u();
    const double office_kw = (workday ? 1.0 : 0.3) * (190.0 + 320.0 * summer) * day_scale;

    const double decl = 23.45 * pi / 180.0 * std::sin(2.0 * pi * (284 + d + 1) / days);
    const double daylight = 24.0 / pi * std::acos(std::clamp(-std::tan(phi) * std::tan(decl), -1.0, 1.0));
    const double sunrise = 12.5 - daylight / 2.0;
    const double noon_gain = std::cos(phi - decl);
    const double clear = summer > 0.5 ? 0.55 + 0.45 * u() : 0.3 + 0.7 * u();

    for (int h = 0; h < static_cast<int>(kHoursPerDay); ++h) {
      const double office_shape = std::exp(-0.5 * std::pow((h - 14.0) / 3.2, 2.0));
      const double base = spec.base_kw * (1.0 + 0.03 * std::sin(2.0 * pi * h / 24.0)) + 8.0 * u();
      raw.push_back(base + office_kw * office_shape);

      const double x = (h + 0.5 - sunrise) / daylight;
      double v = 0.0;
      if (x > 0.0 && x < 1.0) v = std::pow(std::sin(pi * x), 1.3) * noon_gain * clear;
      p.pv_pu.push_back(std::clamp(round_to(v, 1e4), 0.0, 1.0));
      p.epoch_hours.push_back(first + static_cast<std::int64_t>(d) * 24 + h);
      p.timestamps.push_back(format_iso_hour(p.epoch_hours.back()));
    }
  }
  const double top = *std::max_element(raw.begin(), raw.end());
  p.load_kw.reserve(raw.size());
  for (double v : raw) p.load_kw.push_back(round_to(v * spec.peak_kw / top, 100.0));
  return p;
}

}  // namespace dersizer
