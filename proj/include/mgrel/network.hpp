#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mgrel/res_models.hpp"

namespace mgrel {

struct ComponentReliability {
  double failure_rate = 0.0;   // occurrences/yr
  double repair_time_h = 0.0;  // hours
  bool operator==(const ComponentReliability&) const = default;
};

struct UpstreamLink {
  double failure_rate = 0.0;   // occurrences/yr
  double repair_time_h = 0.0;  // hours
  bool operator==(const UpstreamLink&) const = default;
};

struct LoadPoint {
  std::string id;
  double level_kw = 0.0;
  std::uint32_t customers = 0;
  int priority_rank = 0;  // 1 = most sensitive
  std::string customer_class;
  bool operator==(const LoadPoint&) const = default;
};

// Feeder section in a radial tree. An empty `parent` marks the root, which
// sits directly behind the feeder breaker.
struct FeederSection {
  std::string id;
  ComponentReliability reliability;
  std::string parent;
  bool isolator_upstream = false;
  bool isolator_downstream = false;
  std::vector<std::string> load_points;
  bool operator==(const FeederSection&) const = default;
};

enum class SwitchKind { feeder_breaker, isolator, normally_open_tie };

std::string_view to_string(SwitchKind kind) noexcept;
std::optional<SwitchKind> switch_kind_from_string(std::string_view text) noexcept;

// For the breaker, `section` is the root section; for the tie it is the
// section whose far end the tie closes onto. Isolator entries only carry a
// switching time (placement is given by the section flags) and may leave
// `section` empty.
struct Switchgear {
  std::string id;
  SwitchKind kind = SwitchKind::isolator;
  double switching_time_h = 0.0;
  std::string section;
  bool operator==(const Switchgear&) const = default;
};

struct FeederTopology {
  std::vector<FeederSection> sections;
  std::vector<Switchgear> switchgear;
  bool operator==(const FeederTopology&) const = default;
};

// Per-LP totals of sum(lambda_j) and sum(lambda_j * r_j), given directly.
struct AggregateContribution {
  double sum_lambda = 0.0;    // occurrences/yr
  double sum_lambda_r = 0.0;  // h/yr
  bool operator==(const AggregateContribution&) const = default;
};

using AggregateContributions = std::map<std::string, AggregateContribution>;

struct NetworkModel {
  std::vector<LoadPoint> load_points;
  UpstreamLink upstream;
  // Buses that host generation only (no customers).
  std::vector<std::string> generation_buses;
  std::variant<AggregateContributions, FeederTopology> contributions;

  bool is_topology() const noexcept { return std::holds_alternative<FeederTopology>(contributions); }
  const LoadPoint* find_load_point(std::string_view id) const noexcept;
  bool has_bus(std::string_view id) const noexcept;
  std::uint64_t total_customers() const noexcept;
  double total_load_kw() const noexcept;
  bool operator==(const NetworkModel&) const = default;
};

enum class EffectClass { repair, switch_restore, none };

std::string_view to_string(EffectClass c) noexcept;

struct FailureEffect {
  std::string load_point;
  EffectClass effect = EffectClass::none;
  double duration_h = 0.0;
};

/// Throws TopologyError on an invalid tree or switchgear layout.
void validate_topology(const NetworkModel& network);

/// Classifies every load point for a fault on `failed_section`. Results are
/// in `network.load_points` order.
std::vector<FailureEffect> analyze_failure_effects(const NetworkModel& network,
                                                   std::string_view failed_section);

struct Contribution {
  std::string source;  // section id, or "aggregate"
  double failure_rate = 0.0;
  double duration_h = 0.0;
};

struct LoadPointContributions {
  std::string load_point;
  std::vector<Contribution> pairs;
  double sum_lambda = 0.0;
  double sum_lambda_r = 0.0;
};

struct ContributionTable {
  std::vector<LoadPointContributions> rows;  // network.load_points order

  const LoadPointContributions* find(std::string_view load_point) const noexcept;
};

ContributionTable build_contribution_table(const NetworkModel& network);

struct DgPlacement {
  std::string unit;
  std::string bus;
  double rated_kw = 0.0;
};

struct CalibratedDataset {
  NetworkModel network;
  std::vector<DgPlacement> dg_placements;
};

/// Four-load-point study feeder in aggregate mode. The per-LP aggregates are
/// back-derived from the published no-DG indices by removing the upstream
/// term, so the analytical path reproduces them exactly.
CalibratedDataset load_calibrated_dataset();

/// Illustrative topology-mode reconstruction of the same feeder: a
/// seven-section trunk with isolators at every section boundary, the breaker
/// on S1 and a normally open tie at the end of S7. Section data are
/// representative values, not published ones.
NetworkModel illustrative_topology();

}  // namespace mgrel
