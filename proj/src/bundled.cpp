#include "mgrel/scenario_io.hpp"

namespace mgrel {

namespace {

WindTurbineSpec wtg1_spec() { return {2000.0, 15.0, 3.0, 25.0, "R1"}; }
WindTurbineSpec wtg2_spec() { return {1500.0, 12.0, 3.0, 25.0, "R2"}; }
PvArraySpec pv_spec() { return {2000.0, 1000.0, 150.0}; }

Scenario base_scenario(std::string name, std::string description) {
  const auto data = load_calibrated_dataset();
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.seed = kDefaultSeed;
  s.network = data.network;
  s.resources = default_resource_params();
  s.priority = {"LP9", "LP3", "LP4", "LP2"};
  return s;
}

Fleet two_wind_two_pv() {
  Fleet f;
  f.turbines = {{"WTG1", "LP7", wtg1_spec()}, {"WTG2", "LP10", wtg2_spec()}};
  f.pv_arrays = {{"PV1", "LP1", pv_spec()}, {"PV2", "LP8", pv_spec()}};
  return f;
}

}  // namespace

std::map<std::string, Scenario> bundled_scenarios() {
  std::map<std::string, Scenario> out;

  out.emplace("case1", base_scenario("case1", "Grid-connected feeder without distributed generation."));

  {
    // Only two turbine types are tabulated; the four-turbine fleet repeats
    // them on the PV buses. Repeated units share their region's daily speed.
    auto s = base_scenario("case2", "Four wind turbines (WTG1/WTG2 types repeated on LP1/LP8; reconstruction).");
    s.fleet.turbines = {{"WTG1", "LP7", wtg1_spec()},
                        {"WTG2", "LP10", wtg2_spec()},
                        {"WTG3", "LP1", wtg1_spec()},
                        {"WTG4", "LP8", wtg2_spec()}};
    out.emplace("case2", std::move(s));
  }

  {
    auto s = base_scenario("case3", "Two wind turbines and two PV arrays.");
    s.fleet = two_wind_two_pv();
    out.emplace("case3", std::move(s));
  }

  {
    auto s = base_scenario("case4", "Case 3 with a per-day load profile (flat placeholder; supply a chronological profile).");
    s.fleet = two_wind_two_pv();
    s.load_factors.assign(kDaysPerYear, 1.0);
    out.emplace("case4", std::move(s));
  }

  {
    auto s = base_scenario("sweep", "Case 3 with the islanding-success sensitivity sweep.");
    s.fleet = two_wind_two_pv();
    s.sweep_p = {1.0, 0.75, 0.5, 0.25, 0.0};
    out.emplace("sweep", std::move(s));
  }
  return out;
}

}  // namespace mgrel
