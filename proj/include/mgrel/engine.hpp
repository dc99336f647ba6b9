#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgrel/network.hpp"
#include "mgrel/res_models.hpp"

namespace mgrel {

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

// serve_if_fits: every load is tried in priority order and served when its
// full level fits the remaining capacity.
// blocking: the scan stops at the first load that does not fit, so only a
// priority prefix is ever served.
enum class DispatchPolicy { serve_if_fits, blocking };

std::string_view to_string(DispatchPolicy policy) noexcept;

struct PriorityLoad {
  std::string id;
  double level_kw = 0.0;
};

/// Ids of the loads that are fully supplied from `total_res_kw`. `loads`
/// must already be in priority order; surplus generation is curtailed.
std::vector<std::string> priority_dispatch(double total_res_kw, std::span<const PriorityLoad> loads,
                                           DispatchPolicy policy = DispatchPolicy::serve_if_fits);

/// Index-based form used in the daily loop: sets supplied[i] to 1 or 0 and
/// returns the number of supplied loads.
std::size_t dispatch_levels(double total_res_kw, std::span<const double> levels, DispatchPolicy policy,
                            std::span<std::uint8_t> supplied) noexcept;

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct SimulationControls {
  std::uint64_t max_years = 100'000;
  std::uint64_t min_years = 1'000;
  std::uint64_t window_years = 100;
  double tolerance = 0.005;
  bool operator==(const SimulationControls&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  std::uint64_t seed = 0;
  NetworkModel network;
  Fleet fleet;
  ResourceParams resources;
  std::vector<std::string> priority;  // most sensitive first
  std::vector<double> load_factors;   // empty, or one factor per day of year
  double p_islanding = 1.0;
  DispatchPolicy dispatch = DispatchPolicy::blocking;
  SimulationControls simulation;
  std::vector<double> sweep_p;  // optional islanding-success sweep

  // Throws DomainError/TopologyError describing the first violated constraint.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------------------
// Estimates and indices
// ---------------------------------------------------------------------------

// Days on which renewables fully supplied each load point. Counts are in
// network.load_points order.
struct PResEstimate {
  std::vector<std::string> load_points;
  std::vector<std::uint64_t> supplied_days;
  std::uint64_t total_days = 0;

  double p_res(std::size_t i) const noexcept;
  double p_res(std::string_view load_point) const;
  PResEstimate& merge(const PResEstimate& other);
  bool operator==(const PResEstimate&) const = default;
};

struct LoadPointIndices {
  std::string id;
  double lambda = 0.0;  // occurrences/yr
  double u = 0.0;       // h/yr
  double r = 0.0;       // h
  bool zero_lambda = false;  // r forced to 0 because lambda == 0
  bool operator==(const LoadPointIndices&) const = default;
};

struct SystemIndices {
  double saifi = 0.0;  // interruptions/yr/customer
  double saidi = 0.0;  // h/yr/customer
  double caidi = 0.0;  // h/interruption
  double ens = 0.0;    // kWh/yr
  double aens = 0.0;   // kWh/yr/customer
  bool operator==(const SystemIndices&) const = default;
};

/// Simulates one year of daily renewable supply. The result has total_days
/// = 365 and the per-LP count of fully supplied days.
PResEstimate simulate_year(const Scenario& scenario, std::uint64_t year_index);

/// Years [first_year, first_year + count) merged; equal to merging
/// simulate_year over the range, without rebuilding the sampler each year.
PResEstimate simulate_years(const Scenario& scenario, std::uint64_t first_year, std::uint64_t count);

/// lambda_i = sum(lambda_j) + (1 - p_isl * P_RES_i) * lambda_up
/// U_i      = sum(lambda_j r_j) + (1 - p_isl * P_RES_i) * lambda_up * r_up
std::vector<LoadPointIndices> combine_analytical(const PResEstimate& p_res, const ContributionTable& contributions,
                                                 const UpstreamLink& upstream, double p_islanding);

/// Customer-weighted system indices. Throws DivisionGuardError when there are
/// no customers or SAIFI is zero.
SystemIndices compute_system_indices(std::span<const LoadPointIndices> indices,
                                     std::span<const LoadPoint> load_points);

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  std::uint64_t year = 0;
  double running_ens = 0.0;
  double statistic = 0.0;  // +inf until the moving window has filled
};

struct RunOptions {
  unsigned workers = 1;
  std::ostream* diagnostics = nullptr;
};

struct RunResult {
  std::string scenario_name;
  std::uint64_t seed = 0;
  PResEstimate p_res;
  std::vector<LoadPointIndices> load_points;
  SystemIndices system;
  std::vector<ConvergenceRow> trace;
  std::uint64_t years_run = 0;
  bool converged = false;
};

/// Iterates simulated years until the relative change of the moving-average
/// running ENS drops below tolerance (after min_years) or max_years is hit.
/// Output depends only on the scenario, never on `options.workers`.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

struct SensitivityRow {
  double p_islanding = 0.0;
  SystemIndices indices;
  bool operator==(const SensitivityRow&) const = default;
};

/// Recombines a fixed P_RES estimate at each islanding-success probability.
std::vector<SensitivityRow> recombine_sweep(const Scenario& scenario, const PResEstimate& p_res,
                                            std::span<const double> p_values);

struct SweepResult {
  RunResult base;
  std::vector<SensitivityRow> rows;
};

SweepResult sensitivity_sweep(const Scenario& scenario, std::span<const double> p_values,
                              const RunOptions& options = {});

}  // namespace mgrel
