#include "dersizer/scenario_reduction.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "dersizer/errors.hpp"

namespace dersizer {
namespace {

constexpr std::size_t H = kHoursPerDay;

std::vector<double> zscore(const Series& v, std::size_t n, bool normalize) {
  std::vector<double> out(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  if (!normalize || n == 0) return out;
  double mean = 0.0;
  for (double x : out) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : out) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (double& x : out) x = sd > 0.0 ? (x - mean) / sd : 0.0;
  return out;
}

double day_distance(const std::vector<double>& a, std::size_t da, std::size_t db) {
  double sum = 0.0;
  for (std::size_t h = 0; h < H; ++h) {
    const double d = a[da * H + h] - a[db * H + h];
    sum += d * d;
  }
  return sum;
}

}  // namespace

ScenarioSet reduce_scenarios(const AnnualProfile& annual, const ReductionConfig& cfg,
                             const LoadSplitSpec& split) {
  const std::size_t days = annual.whole_days();
  if (cfg.k == 0) throw ConfigError("k must be at least 1");
  if (cfg.k > days) {
    throw ConfigError(fmt::format("k = {} exceeds the {} whole days in the profile", cfg.k, days));
  }
  if (cfg.method != "greedy-medoids") {
    throw ConfigError("unknown reduction method '" + cfg.method + "'");
  }
  const std::size_t n = days * H;
  const auto load = zscore(annual.load_kw, n, cfg.normalize);
  const auto pv = zscore(annual.pv_pu, n, cfg.normalize);

  // full pairwise distance matrix
  std::vector<double> dist(days * days, 0.0);
  for (std::size_t a = 0; a < days; ++a) {
    for (std::size_t b = a + 1; b < days; ++b) {
      double d2 = day_distance(load, a, b);
      if (cfg.include_pv) d2 += day_distance(pv, a, b);
      dist[a * days + b] = dist[b * days + a] = std::sqrt(d2);
    }
  }

  std::vector<std::size_t> chosen;
  std::vector<char> is_chosen(days, 0);
  std::vector<double> nearest(days, std::numeric_limits<double>::infinity());
  for (std::size_t step = 0; step < cfg.k; ++step) {
    std::size_t best = days;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < days; ++c) {
      if (is_chosen[c]) continue;
      double cost = 0.0;
      for (std::size_t d = 0; d < days; ++d) cost += std::min(nearest[d], dist[c * days + d]);
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
    chosen.push_back(best);
    is_chosen[best] = 1;
    for (std::size_t d = 0; d < days; ++d) nearest[d] = std::min(nearest[d], dist[best * days + d]);
  }
  std::sort(chosen.begin(), chosen.end());

  // Assign every day to its closest representative; a representative always
  // keeps itself even when another one is equally close.
  std::vector<std::size_t> count(chosen.size(), 0);
  for (std::size_t d = 0; d < days; ++d) {
    std::size_t pick = 0;
    if (is_chosen[d]) {
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), d) - chosen.begin());
    } else {
      for (std::size_t r = 1; r < chosen.size(); ++r) {
        if (dist[chosen[r] * days + d] < dist[chosen[pick] * days + d]) pick = r;
      }
    }
    ++count[pick];
  }

  ScenarioSet set;
  for (std::size_t r = 0; r < chosen.size(); ++r) {
    const std::size_t d = chosen[r];
    const auto first = static_cast<std::ptrdiff_t>(d * H);
    const Series day_load(annual.load_kw.begin() + first, annual.load_kw.begin() + first + H);
    auto classes = split_loads(day_load, split);
    DayScenario s;
    s.id = annual.timestamps.size() > d * H ? annual.timestamps[d * H].substr(0, 10)
                                            : fmt::format("day{}", d);
    s.source_day = d;
    s.probability = static_cast<double>(count[r]) / static_cast<double>(days);
    s.cl_ac = std::move(classes.cl_ac);
    s.cl_dc = std::move(classes.cl_dc);
    s.nl_ac = std::move(classes.nl_ac);
    s.nl_dc = std::move(classes.nl_dc);
    s.pv_availability.assign(annual.pv_pu.begin() + first, annual.pv_pu.begin() + first + H);
    set.days.push_back(std::move(s));
  }
  return set;
}

double reconstruction_error(const AnnualProfile& annual, const ScenarioSet& set) {
  const std::size_t days = annual.whole_days();
  if (days == 0 || set.days.empty()) return 0.0;
  std::vector<Series> reps;
  for (const auto& s : set.days) {
    Series v(s.intervals());
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = s.total_load(t);
    reps.push_back(std::move(v));
  }
  double total = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : reps) {
      double sum = 0.0;
      for (std::size_t h = 0; h < H && h < r.size(); ++h) {
        const double diff = annual.load_kw[d * H + h] - r[h];
        sum += diff * diff;
      }
      best = std::min(best, std::sqrt(sum));
    }
    total += best;
  }
  return total / static_cast<double>(days);
}

void write_reduction_csv(std::ostream& out, const ScenarioSet& set) {
  out << "day_index,probability\n";
  for (const auto& s : set.days) {
    out << (s.source_day ? fmt::format("{}", *s.source_day) : std::string("")) << ','
        << fmt::format("{}", s.probability) << '\n';
  }
}

}  // namespace dersizer
