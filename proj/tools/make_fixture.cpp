// Writes the packaged synthetic building year and the study config that uses it.

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dersizer/synthetic.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  const dersizer::SyntheticSpec spec;
  dersizer::write_profile_csv(dir / fmt::format("synthetic_building_{}.csv", spec.year),
                              dersizer::synthetic_building_year(spec));

  std::ofstream cfg(dir / "study.json");
  cfg << fmt::format(R"({{
  "profile": "synthetic_building_{}.csv",
  "output_dir": "../out",
  "cases": [0, 1, 2, 3],
  "reduction": {{"k": 6, "include_pv": false, "normalize": true, "method": "greedy-medoids"}},
  "load_split": {{"critical_fraction": 0.3, "dc_fraction_of_critical": 0.5, "dc_fraction_of_noncritical": 0.5}},
  "catalog": {{"c_pv": 108.0, "c_es": 424.0, "c_ic": 8.1, "c_inv": 6.5, "c_con": 4.3, "c_deg": 0.005,
              "voll_cl": 3000, "voll_nl": 500, "pv_max": 400, "es_max": 350}},
  "tariff": {{"energy_price": "default_tou", "demand_price": 18.0, "peak_cap": 1000}},
  "annual_day_weight": 365,
  "annual_demand_weight": 12,
  "model": {{"soc_boundary": "cyclic"}},
  "solver": {{"backend": "reference", "gap": 0.0001, "time_limit": 600}}
}}
)",
                     spec.year);
  if (!cfg) {
    std::cerr << "cannot write " << (dir / "study.json") << '\n';
    return 3;
  }
  return 0;
}
