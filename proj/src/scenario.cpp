#include <algorithm>
#include <cmath>
#include <set>

#include "mgrel/engine.hpp"
#include "mgrel/errors.hpp"

namespace mgrel {

namespace {

bool nonneg_finite(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void Scenario::validate() const {
  resources.validate();

  // Load points.
  std::set<std::string> lp_ids;
  std::set<int> ranks;
  for (const auto& lp : network.load_points) {
    if (lp.id.empty()) throw DomainError("load point with empty id");
    if (!lp_ids.insert(lp.id).second) throw DomainError("duplicate load point '" + lp.id + "'");
    if (!nonneg_finite(lp.level_kw)) throw DomainError("load point '" + lp.id + "' has a negative load level");
    if (lp.priority_rank < 1) throw DomainError("load point '" + lp.id + "' needs a priority rank >= 1");
    if (!ranks.insert(lp.priority_rank).second) {
      throw DomainError("priority rank " + std::to_string(lp.priority_rank) + " is used twice");
    }
  }
  for (const auto& bus : network.generation_buses) {
    if (lp_ids.contains(bus)) throw DomainError("bus '" + bus + "' is both a load point and a generation bus");
  }
  if (!nonneg_finite(network.upstream.failure_rate) || !nonneg_finite(network.upstream.repair_time_h)) {
    throw DomainError("upstream failure rate and repair time must be >= 0");
  }

  if (network.is_topology()) {
    validate_topology(network);
  } else {
    const auto& agg = std::get<AggregateContributions>(network.contributions);
    for (const auto& [id, c] : agg) {
      if (!lp_ids.contains(id)) throw DomainError("aggregate contribution for unknown load point '" + id + "'");
      if (!nonneg_finite(c.sum_lambda) || !nonneg_finite(c.sum_lambda_r)) {
        throw DomainError("aggregate contribution for '" + id + "' must be >= 0");
      }
      if (c.sum_lambda == 0.0 && c.sum_lambda_r > 0.0) {
        throw DomainError("aggregate contribution for '" + id + "' has unavailability without failures");
      }
    }
    for (const auto& id : lp_ids) {
      if (!agg.contains(id)) throw DomainError("load point '" + id + "' has no aggregate contribution");
    }
  }

  // Priority list: exactly the load-bearing load points, matching their ranks.
  std::set<std::string> listed;
  for (std::size_t i = 0; i < priority.size(); ++i) {
    const auto* lp = network.find_load_point(priority[i]);
    if (lp == nullptr) throw DomainError("priority list names unknown load point '" + priority[i] + "'");
    if (!listed.insert(priority[i]).second) throw DomainError("priority list repeats '" + priority[i] + "'");
    if (lp->priority_rank != static_cast<int>(i + 1)) {
      throw DomainError("priority list position of '" + priority[i] + "' disagrees with its rank");
    }
  }
  for (const auto& lp : network.load_points) {
    if (lp.level_kw > 0.0 && !listed.contains(lp.id)) {
      throw DomainError("priority list is missing load point '" + lp.id + "'");
    }
  }

  // Fleet.
  std::set<std::string> unit_ids;
  for (const auto& t : fleet.turbines) {
    if (!unit_ids.insert(t.id).second) throw DomainError("duplicate DG id '" + t.id + "'");
    t.spec.validate();
    if (!network.has_bus(t.location)) throw DomainError("turbine '" + t.id + "' sits on unknown bus '" + t.location + "'");
    const bool region_known = std::any_of(resources.wind_regions.begin(), resources.wind_regions.end(),
                                          [&](const WeibullParams& r) { return r.region_id == t.spec.region_id; });
    if (!region_known) throw DomainError("turbine '" + t.id + "' references unknown region '" + t.spec.region_id + "'");
  }
  for (const auto& p : fleet.pv_arrays) {
    if (!unit_ids.insert(p.id).second) throw DomainError("duplicate DG id '" + p.id + "'");
    p.spec.validate();
    if (!network.has_bus(p.location)) throw DomainError("PV array '" + p.id + "' sits on unknown bus '" + p.location + "'");
  }

  if (!load_factors.empty() && load_factors.size() != kDaysPerYear) {
    throw DomainError("load_factors must hold exactly 365 values");
  }
  for (double f : load_factors) {
    if (!nonneg_finite(f)) throw DomainError("load factors must be >= 0");
  }
  if (!(p_islanding >= 0.0 && p_islanding <= 1.0)) throw DomainError("p_islanding must lie in [0, 1]");
  for (double p : sweep_p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sweep probabilities must lie in [0, 1]");
  }

  if (simulation.max_years < 1) throw DomainError("max_years must be >= 1");
  if (simulation.min_years > simulation.max_years) throw DomainError("min_years must not exceed max_years");
  if (simulation.window_years < 1) throw DomainError("window_years must be >= 1");
  if (!(simulation.tolerance > 0.0) || !std::isfinite(simulation.tolerance)) throw DomainError("tolerance must be > 0");
}

}  // namespace mgrel
