#include "mgrel/network.hpp"

namespace mgrel {

namespace {

std::vector<LoadPoint> study_load_points() {
  return {
      {"LP2", 1000.0, 100, 4, "commercial"},
      {"LP3", 3000.0, 300, 2, "office"},
      {"LP4", 1000.0, 250, 3, "residential"},
      {"LP9", 500.0, 50, 1, "government"},
  };
}

}  // namespace

CalibratedDataset load_calibrated_dataset() {
  CalibratedDataset data;
  auto& net = data.network;
  net.load_points = study_load_points();
  net.upstream = {0.5, 10.0};
  net.generation_buses = {"LP1", "LP7", "LP8", "LP10"};

  // No-DG per-LP (lambda, U) minus the upstream term (0.5 f/yr, 0.5 * 10 h/yr).
  AggregateContributions agg;
  agg["LP2"] = {0.226, 3.017};
  agg["LP3"] = {0.226, 2.858};
  agg["LP4"] = {0.226, 2.328};
  agg["LP9"] = {0.156, 1.924};
  net.contributions = std::move(agg);

  data.dg_placements = {
      {"WTG1", "LP7", 2000.0},
      {"WTG2", "LP10", 1500.0},
      {"PV1", "LP1", 2000.0},
      {"PV2", "LP8", 2000.0},
  };
  return data;
}

NetworkModel illustrative_topology() {
  NetworkModel net;
  net.load_points = study_load_points();
  net.upstream = {0.5, 10.0};
  net.generation_buses = {"LP1", "LP7", "LP8", "LP10"};

  constexpr double kRepairH = 30.0;
  constexpr double kSwitchingH = 3.5;
  auto trunk = [&](std::string id, double lambda, std::string parent, std::vector<std::string> buses) {
    return FeederSection{std::move(id), {lambda, kRepairH}, std::move(parent), true, true, std::move(buses)};
  };

  FeederTopology topo;
  topo.sections = {
      trunk("S1", 0.039, "", {"LP1"}),
      trunk("S2", 0.026, "S1", {"LP2"}),
      trunk("S3", 0.039, "S2", {"LP7"}),
      trunk("S4", 0.052, "S3", {"LP3", "LP4"}),
      trunk("S5", 0.026, "S4", {"LP8"}),
      trunk("S6", 0.026, "S5", {"LP9"}),
      trunk("S7", 0.018, "S6", {"LP10"}),
  };
  topo.switchgear = {
      {"F1", SwitchKind::feeder_breaker, kSwitchingH, "S1"},
      {"ISO", SwitchKind::isolator, kSwitchingH, ""},
      {"NO1", SwitchKind::normally_open_tie, kSwitchingH, "S7"},
  };
  net.contributions = std::move(topo);
  return net;
}

}  // namespace mgrel
